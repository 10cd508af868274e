from .interface import RealizationRunner
from .serial import SerialRealizationRunner
from .threaded import ThreadedRealizationRunner


__all__ = ["RealizationRunner", "SerialRealizationRunner", "ThreadedRealizationRunner"]
