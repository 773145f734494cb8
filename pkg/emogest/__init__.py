""" Emotional speech-driven 3D gesture generation and editing."""

__version__ = '0.1.0'
