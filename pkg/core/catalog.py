import logging
import os
import sys
from typing import Literal, Optional

import msgspec

from core.errors import FixtureError, UnknownIdentity, UnknownSeries

logger = logging.getLogger(__name__)

SUITES = ("thm1.1", "thm1.2", "thm1.3", "thm1.4", "lemmas", "modular", "mock")


def resource_path(relative_path):
    """Get absolute path to resource, works for a source checkout and for a PyInstaller bundle"""
    try:
        base_path = sys._MEIPASS
    except AttributeError:
        base_path = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    return os.path.join(base_path, relative_path)


class IdentitySpec(msgspec.Struct, frozen=True):
    id: str
    suite: str
    kind: Literal["equality", "nonnegativity", "level100"]
    tag: str
    order: int
    lhs: Optional[dict] = None
    rhs: Optional[dict] = None
    start: Optional[int] = None
    readings: Optional[dict[str, dict]] = None
    note: Optional[str] = None
    which: Optional[str] = None


class EtaSummand(msgspec.Struct, frozen=True):
    c: str
    expr: str


class EtaIdentity(msgspec.Struct, frozen=True):
    tag: str
    level: int
    bound: int
    restates: str
    prefactor: str
    lhs: list[EtaSummand]
    rhs: list[EtaSummand]
    note: Optional[str] = None


class CatalogHandler:
    def __init__(self, assets_dir=None):
        self.assets_dir = assets_dir or resource_path("assets")
        self.definitions = None
        self.identities = None
        self.eta_identities = None

    def _read(self, name, schema):
        path = os.path.join(self.assets_dir, name)
        try:
            with open(path, "rb") as f:
                return msgspec.json.decode(f.read(), type=schema)
        except FileNotFoundError:
            raise FixtureError(f"fixture file {path} not found")
        except msgspec.ValidationError as e:
            raise FixtureError(f"{name}: {e}")
        except msgspec.DecodeError as e:
            raise FixtureError(f"{name} is not valid JSON: {e}")

    def definitions_function(self):
        if self.definitions is None:
            self.definitions = self._read("definitions.json", dict[str, dict])
            logger.debug("loaded %d named series", len(self.definitions))
        return self.definitions

    def identities_function(self):
        if self.identities is None:
            identities = self._read("identities.json", list[IdentitySpec])
            seen = set()
            for spec in identities:
                if spec.id in seen:
                    raise FixtureError(f"identity {spec.id} listed twice")
                if spec.suite not in SUITES:
                    raise FixtureError(f"identity {spec.id} names unknown suite {spec.suite}")
                seen.add(spec.id)
            self.identities = identities
            logger.debug("loaded %d identities", len(identities))
        return self.identities

    def eta_function(self):
        if self.eta_identities is None:
            self.eta_identities = self._read("eta_level100.json", dict[str, EtaIdentity])
        return self.eta_identities

    def identity_converter(self, identity_id):
        for spec in self.identities_function():
            if spec.id == identity_id:
                return spec
        raise UnknownIdentity(f"no identity named {identity_id!r}")

    def definition_converter(self, name):
        try:
            return self.definitions_function()[name]
        except KeyError:
            raise UnknownSeries(f"no series named {name!r}")

    def eta_converter(self, which):
        try:
            return self.eta_function()[which]
        except KeyError:
            raise UnknownIdentity(f"no level 100 identity named {which!r}")

    def suite_identities(self, suite="all"):
        if suite == "all":
            return list(self.identities_function())
        return [spec for spec in self.identities_function() if spec.suite == suite]
