"""Domain repositories module""" 