"""Application use cases module""" 