"""Infrastructure layer module""" 