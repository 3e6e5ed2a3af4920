"""Direction-controllable hand grasp synthesis and handover sequence generation."""

__version__ = "0.1.0"
