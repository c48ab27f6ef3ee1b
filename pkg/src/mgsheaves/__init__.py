"""Sheaves on moment graphs: BMP sheaves, Z-lattices and duality checks."""

from __future__ import annotations

__version__ = "0.1.0"
