"""Command line front-end"""
