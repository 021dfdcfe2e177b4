"""Infrastructure repositories module""" 