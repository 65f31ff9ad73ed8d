from .hashing import digest_arrays, digest_file
from .parallel import thread_map

__all__ = ["digest_arrays", "digest_file", "thread_map"]
