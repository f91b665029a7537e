"""Unit system: energies in eV (hbar = 1), lengths in nm, temperatures in K,
magnetic fields in Oe, forces in fN."""

from dataclasses import dataclass

CONSTANTS_VERSION = 1


@dataclass(frozen=True)
class PhysConstants:
    hbar_c: float = 197.3269804          # eV nm
    k_b: float = 8.617333262e-5          # eV / K
    ev_per_nm_to_newton: float = 1.602176634e-10  # N per (eV/nm)

    @property
    def ev_per_nm_to_fn(self) -> float:
        return self.ev_per_nm_to_newton * 1e15


CONST = PhysConstants()
