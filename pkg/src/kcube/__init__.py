"""Higher-rank graphs from k-cube group presentations."""
