"""Virtual-node topology toolkit for polar LEO constellation networks."""

__version__ = "0.1.0"
