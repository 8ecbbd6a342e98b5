"""Core-stable committees for approval elections with few voter types."""
