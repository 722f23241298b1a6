"""Country registry: canonical alpha-3 codes with name and alias lookup.

The bundled table is generated from the ISO-3166 list (tools/build_assets.py)
and carries the alias spellings the pipeline actually meets: legacy actor
codes (ROM, TMP, KSV), two-letter FIPS geography codes as used by the event
feeds, and the country-name variants found in refugee statistics and census
exports. Lookup is case-insensitive; two-letter ISO codes are intentionally
absent because they collide with FIPS.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator


class CountryLookupError(ValueError):
    """A raw country value could not be resolved to a canonical code."""


class MissingCountryCode(CountryLookupError):
    """The input was empty or whitespace."""


class UnknownCountryCode(CountryLookupError):
    """The input is not a known code, name, or alias."""


@dataclass(frozen=True)
class Country:
    alpha3: str
    name: str
    aliases: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(self.alpha3) != 3 or not self.alpha3.isalpha() \
                or not self.alpha3.isupper():
            raise ValueError(f"bad alpha-3 code {self.alpha3!r}")
        if not self.name.strip():
            raise ValueError(f"{self.alpha3}: empty country name")


class CountryRegistry:
    """Resolves codes, names, and aliases to canonical alpha-3 codes."""

    def __init__(self, countries: Iterable[Country]):
        self._countries: dict[str, Country] = {}
        self._index: dict[str, str] = {}
        for country in countries:
            if country.alpha3 in self._countries:
                raise ValueError(f"duplicate country {country.alpha3}")
            self._countries[country.alpha3] = country
        for country in self._countries.values():
            for key in (country.alpha3, country.name, *country.aliases):
                folded = key.casefold()
                claimed = self._index.get(folded)
                if claimed is not None and claimed != country.alpha3:
                    raise ValueError(
                        f"alias {key!r} claimed by {claimed} and {country.alpha3}")
                self._index[folded] = country.alpha3

    @classmethod
    def from_csv(cls, source: Path | str | io.TextIOBase) -> "CountryRegistry":
        """Load a registry from CSV with columns alpha3, name, aliases.

        The aliases column is pipe-separated and may be empty.
        """
        if isinstance(source, (str, Path)):
            with open(source, encoding="utf-8", newline="") as fh:
                return cls._from_reader(csv.DictReader(fh), str(source))
        return cls._from_reader(csv.DictReader(source), "<stream>")

    @classmethod
    def _from_reader(cls, reader: csv.DictReader, label: str) -> "CountryRegistry":
        required = {"alpha3", "name", "aliases"}
        header = set(reader.fieldnames or ())
        if not required <= header:
            raise ValueError(
                f"{label}: registry needs columns {sorted(required)}, "
                f"got {sorted(header)}")
        countries = []
        for row in reader:
            aliases = tuple(a for a in (row["aliases"] or "").split("|") if a)
            countries.append(Country(row["alpha3"], row["name"], aliases))
        return cls(countries)

    def normalize(self, raw: str) -> str:
        """Resolve a code, name, or alias to its canonical alpha-3 code.

        Raises MissingCountryCode for empty input and UnknownCountryCode
        when nothing in the registry matches.
        """
        text = (raw or "").strip()
        if not text:
            raise MissingCountryCode("empty country value")
        code = self._index.get(text.casefold())
        if code is None:
            raise UnknownCountryCode(f"unknown country {text!r}")
        return code

    def name_of(self, alpha3: str) -> str:
        return self._countries[alpha3].name

    def codes(self) -> Iterator[str]:
        return iter(sorted(self._countries))

    def __contains__(self, alpha3: str) -> bool:
        return alpha3 in self._countries

    def __len__(self) -> int:
        return len(self._countries)


@lru_cache(maxsize=1)
def bundled_registry() -> CountryRegistry:
    """The registry shipped with the package."""
    ref = resources.files("xenomap").joinpath("data/countries.csv")
    with ref.open(encoding="utf-8", newline="") as fh:
        return CountryRegistry._from_reader(csv.DictReader(fh), "bundled")
