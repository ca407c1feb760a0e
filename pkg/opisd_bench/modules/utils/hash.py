import hashlib
import json
import os
import platform
import threading
from collections import OrderedDict

from .. import config
from .log import log_error, log_warning

HASH_CACHE_FILE = "network_hash_cache.json"
OPTIMUM_CACHE_FILE = "global_optimum_cache.json"
CACHE_SIZE_LIMIT = 100
DIGEST_LENGTH = 16


class JsonDiskCache:
    """Small JSON dictionary on disk, trimmed to the newest entries and written atomically."""

    def __init__(self, path, size_limit=CACHE_SIZE_LIMIT):
        self.path = path
        self.size_limit = size_limit
        self.lock = threading.Lock()
        self.dirty = False
        self.data = {}
        if os.path.exists(path):
            try:
                with open(path, "r", encoding="utf-8") as f:
                    self.data = json.load(f)
            except Exception as e:
                log_error(f"Failed to load cache file {path}: {e}")
                self.data = {}

    def get(self, key):
        with self.lock:
            return self.data.get(key)

    def put(self, key, record):
        with self.lock:
            if self.data.get(key) == record:
                return
            self.data.pop(key, None)
            self.data[key] = record
            self.dirty = True
            self._save()

    def _save(self):
        if not self.dirty:
            return
        try:
            if len(self.data) > self.size_limit:
                self.data = dict(list(self.data.items())[-self.size_limit:])
            os.makedirs(os.path.dirname(self.path), exist_ok=True)
            temp_file = self.path + ".tmp"
            with open(temp_file, "w", encoding="utf-8") as f:
                json.dump(self.data, f, indent=2)
            os.replace(temp_file, self.path)  # Atomic write
            self.dirty = False
        except Exception as e:
            log_error(f"Failed to write cache to {self.path}: {e}")


_disk_caches = {}
_disk_caches_lock = threading.Lock()
cache_network_hash = OrderedDict()
_memory_lock = threading.Lock()


def get_disk_cache(filename) -> JsonDiskCache:
    path = os.path.join(config.CACHE_DIR, filename)
    with _disk_caches_lock:
        if path not in _disk_caches:
            _disk_caches[path] = JsonDiskCache(path)
        return _disk_caches[path]


def _sha256_file(filename) -> str:
    sha256_hash = hashlib.sha256()
    with open(filename, "rb") as f:
        for byte_block in iter(lambda: f.read(4096), b""):
            sha256_hash.update(byte_block)
    return sha256_hash.hexdigest()[:DIGEST_LENGTH]


def calc_hash(filename) -> str:
    """Digest of a network file, memoized in memory and on disk by path and modification time."""
    if not filename or not os.path.isfile(filename):
        log_warning(f"calc_hash: File not found or invalid path: {filename}")
        return ""

    key = os.path.abspath(filename)
    mod_time = os.path.getmtime(filename)
    with _memory_lock:
        cached = cache_network_hash.get(key)
        if cached and cached[1] == mod_time:
            cache_network_hash.move_to_end(key)
            return cached[0]

    disk_cache = get_disk_cache(HASH_CACHE_FILE)
    record = disk_cache.get(key)
    if record and record.get("file_modification_date") == mod_time:
        digest = record["file_hash"]
    else:
        try:
            digest = _sha256_file(filename)
        except Exception as e:
            log_error(f"Failed to calculate hash for {filename}: {e}")
            return ""
        disk_cache.put(key, {"file_hash": digest, "file_modification_date": mod_time})

    with _memory_lock:
        if len(cache_network_hash) >= CACHE_SIZE_LIMIT:
            cache_network_hash.popitem(last=False)  # Remove oldest item
        cache_network_hash[key] = (digest, mod_time)
    return digest


def digest_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:DIGEST_LENGTH]


def digest_values(values) -> str:
    """Digest of a float sequence; repr keeps every value exact."""
    return digest_text(";".join(repr(float(v)) for v in values))


def get_cached_optimum(key: str):
    return get_disk_cache(OPTIMUM_CACHE_FILE).get(key)


def put_cached_optimum(key: str, record: dict):
    get_disk_cache(OPTIMUM_CACHE_FILE).put(key, record)


def environment_fingerprint() -> dict:
    import networkx
    import numpy
    import pandas
    import tqdm

    return {
        "python": platform.python_version(),
        "platform": platform.platform(),
        "numpy": numpy.__version__,
        "pandas": pandas.__version__,
        "networkx": networkx.__version__,
        "tqdm": tqdm.__version__,
    }
