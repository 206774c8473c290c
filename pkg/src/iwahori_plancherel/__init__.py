"""Exact iterated-residue evaluation of Iwahori-spherical Plancherel integrals."""
