"""Simulator for the improved ping-pong quantum direct-communication protocol."""
__version__ = "0.1.0"
