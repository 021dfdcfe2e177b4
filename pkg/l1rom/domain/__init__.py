"""Domain layer module""" 