"""Regenerate the FCIDUMP fixtures in this directory.

Requires pyscf. Integrals are written over spatial orbitals in chemist
notation with eightfold permutational symmetry folded out.

    python3 generate.py
"""
import json
import numpy as np
from pyscf import gto, scf, fci, ao2mo

FIXTURES = [
    # label, atom spec (angstrom), charge, z_max, basis kinds
    ("h2", "H 0 0 0; H 0 0 0.75", 0, 1, ["local", "canonical", "natural"]),
    ("heh_plus", "He 0 0 0; H 0 0 0.7743", 1, 2, ["canonical"]),
    ("h4_chain", "H 0 0 0; H 0 0 0.9; H 0 0 1.8; H 0 0 2.7", 0, 1, ["local", "canonical", "natural"]),
    ("lih", "Li 0 0 0; H 0 0 1.5949", 0, 3, ["canonical"]),
]
BASIS = "sto-6g"


def orbitals(mol, mf, kind):
    if kind == "local":
        s = mol.intor("int1e_ovlp")
        w, v = np.linalg.eigh(s)
        c = v @ np.diag(w ** -0.5) @ v.T
        # order by one-electron diagonal energy (stable, so symmetric atoms keep AO order)
        e = np.einsum("pi,pq,qi->i", c, mf.get_hcore(), c)
        return c[:, np.argsort(np.round(e, 10), kind="stable")]
    if kind == "canonical":
        return mf.mo_coeff
    solver = fci.FCI(mf)
    _, civec = solver.kernel()
    dm = solver.make_rdm1(civec, mf.mo_coeff.shape[1], mol.nelec)
    occ, no = np.linalg.eigh(dm)
    return mf.mo_coeff @ no[:, ::-1]


def write_fcidump(path, h1, eri, nelec, ecore, tol=1e-12):
    n = h1.shape[0]
    with open(path, "w") as f:
        f.write(" &FCI NORB=%d,NELEC=%d,MS2=0,\n" % (n, nelec))
        f.write("  ORBSYM=%s\n" % ("1," * n))
        f.write("  ISYM=1,\n &END\n")
        for i in range(n):
            for j in range(i + 1):
                for k in range(n):
                    for l in range(k + 1):
                        if i * (i + 1) // 2 + j < k * (k + 1) // 2 + l:
                            continue
                        v = eri[i, j, k, l]
                        if abs(v) > tol:
                            f.write("%24.16e %4d %4d %4d %4d\n" % (v, i + 1, j + 1, k + 1, l + 1))
        for i in range(n):
            for j in range(i + 1):
                if abs(h1[i, j]) > tol:
                    f.write("%24.16e %4d %4d %4d %4d\n" % (h1[i, j], i + 1, j + 1, 0, 0))
        f.write("%24.16e %4d %4d %4d %4d\n" % (ecore, 0, 0, 0, 0))


def main():
    manifest = []
    for label, atom, charge, zmax, kinds in FIXTURES:
        mol = gto.M(atom=atom, basis=BASIS, unit="Angstrom", charge=charge, verbose=0)
        mf = scf.RHF(mol).run()
        for kind in kinds:
            c = orbitals(mol, mf, kind)
            h1 = c.T @ mf.get_hcore() @ c
            eri = ao2mo.restore(1, ao2mo.full(mol, c), c.shape[1])
            name = "%s_sto6g_%s.fcidump" % (label, kind)
            write_fcidump(name, h1, eri, mol.nelectron, mol.energy_nuc())
            manifest.append({
                "file": name,
                "label": label,
                "basis": "STO-6G",
                "basis_kind": kind,
                "z_max": zmax,
                "geometry_angstrom": atom,
            })
    with open("manifest.json", "w") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
