"""Application layer module""" 