"""Discrete-time recurrent controller and its flat genome codec."""
