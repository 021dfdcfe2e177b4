from abc import ABC, abstractmethod

from l1rom.domain.entities.dictionary import Dictionary


class DictionaryRepository(ABC):
    """Interface for dictionary persistence"""

    @abstractmethod
    def save(self, dictionary: Dictionary, path: str) -> None:
        """Write a dictionary to path, replacing any existing file"""
        pass

    @abstractmethod
    def load(self, path: str, seed: int = 0) -> Dictionary:
        """Read a dictionary back from path"""
        pass
