"""Community-grounded conversational engine for colorectal health questions."""

__version__ = "0.1.0"
