#!/usr/bin/env python3
#
# retrograph - Copyright 2026 The retrograph Authors.
# SPDX-License-Identifier: Apache-2.0
#
"""Builds data/desk_corpus.tsv: small atom-mapped reactions from fragment templates.

Products are assembled from fragments; reactants are the product with the
template bonds broken and leaving groups attached. Every atom is written as a
bracket atom so hydrogen counts are explicit.
"""
import itertools
import sys

DEFAULT_VALENCE = {"B": [3], "C": [4], "N": [3, 5], "O": [2], "P": [3, 5],
                   "S": [2, 4, 6], "F": [1], "Cl": [1], "Br": [1], "I": [1]}
ORDER = {"-": 1, "=": 2, "#": 3, ":": 1.5}


class Mol:
    def __init__(self):
        self.atoms = []   # dicts: el, arom, map
        self.bonds = {}   # frozenset(i, j) -> symbol

    def add(self, el, arom=False, amap=0):
        self.atoms.append({"el": el, "arom": arom, "map": amap})
        return len(self.atoms) - 1

    def bond(self, i, j, sym="-"):
        assert i != j and frozenset((i, j)) not in self.bonds
        self.bonds[frozenset((i, j))] = sym

    def neighbors(self, i):
        out = []
        for k, s in self.bonds.items():
            if i in k:
                (j,) = k - {i}
                out.append((j, s))
        return sorted(out)

    def units(self, i):
        return sum(1 if s == ":" else ORDER[s] for _, s in self.neighbors(i))

    def hydrogens(self, i):
        a = self.atoms[i]
        u = self.units(i)
        vals = DEFAULT_VALENCE[a["el"]]
        if a["arom"]:
            return max(0, vals[0] - (u + 1))
        for v in vals:
            if v >= u:
                return v - u
        raise ValueError("over-valent atom")

    def merge(self, other):
        off = len(self.atoms)
        for a in other.atoms:
            self.atoms.append(dict(a))
        for k, s in other.bonds.items():
            i, j = sorted(k)
            self.bonds[frozenset((i + off, j + off))] = s
        return off


def frag(smiles):
    """Parses the organic subset with ring digits and branches."""
    m = Mol()
    prev, pending, stack, rings = None, None, [], {}
    i = 0
    while i < len(smiles):
        c = smiles[i]
        if c in "-=#":
            pending = c
        elif c == "(":
            stack.append(prev)
        elif c == ")":
            prev = stack.pop()
        elif c.isdigit():
            d = int(c)
            if d in rings:
                j, s = rings.pop(d)
                m.bond(j, prev, pending or s or (":" if m.atoms[j]["arom"] and m.atoms[prev]["arom"] else "-"))
            else:
                rings[d] = (prev, pending)
            pending = None
        else:
            el = smiles[i:i + 2] if smiles[i:i + 2] in ("Cl", "Br") else c
            i += len(el) - 1
            arom = el.islower()
            idx = m.add(el.upper() if arom else el, arom)
            if prev is not None:
                m.bond(prev, idx, pending or (":" if arom and m.atoms[prev]["arom"] else "-"))
            pending = None
            prev = idx
        i += 1
    assert not rings and not stack
    return m


def write(m):
    seen, out = set(), []
    ring_of, next_digit = {}, [1]
    closures = {}

    def plan(x, parent):
        seen.add(x)
        for j, s in m.neighbors(x):
            if j == parent:
                continue
            if j not in seen:
                plan(j, x)
            elif frozenset((x, j)) not in ring_of:
                ring_of[frozenset((x, j))] = None
                closures.setdefault(j, []).append((x, s))
                closures.setdefault(x, []).append((j, None))

    def token(i):
        a = m.atoms[i]
        el = a["el"].lower() if a["arom"] else a["el"]
        h = m.hydrogens(i)
        hs = "" if h == 0 else ("H" if h == 1 else "H%d" % h)
        mp = ":%d" % a["map"] if a["map"] else ""
        return "[%s%s%s]" % (el, hs, mp)

    def bsym(i, j, s):
        ai, aj = m.atoms[i]["arom"], m.atoms[j]["arom"]
        if s == ":":
            return "" if ai and aj else ":"
        if s == "-":
            return "-" if ai and aj else ""
        return s

    emitted = set()

    def emit(x, parent):
        emitted.add(x)
        s = token(x)
        for j, sym in closures.get(x, []):
            key = frozenset((x, j))
            if ring_of[key] is None:
                d = next_digit[0]
                next_digit[0] += 1
                ring_of[key] = d
                s += bsym(x, j, sym) + str(d)
            else:
                s += str(ring_of[key])
        kids = [(j, sym) for j, sym in m.neighbors(x)
                if j != parent and j not in emitted and frozenset((x, j)) not in ring_of]
        parts = []
        for j, sym in kids:
            if j in emitted:
                continue
            parts.append(bsym(x, j, sym) + emit(j, x))
        for p in parts[:-1]:
            s += "(" + p + ")"
        if parts:
            s += parts[-1]
        return s

    comps = []
    for start in range(len(m.atoms)):
        if start not in seen:
            plan(start, None)
            comps.append(emit(start, None))
    assert next_digit[0] < 10
    return ".".join(comps)


def reaction(pieces, links, leaving, cls):
    """pieces: fragments of the product; links: (piece, atom, piece, atom, sym)
    product bonds that form in the reaction; leaving: per link, the fragment
    and sites that cap each side in the reactants."""
    prod = Mol()
    offs = [prod.merge(frag(p)) for p in pieces]
    for k in range(len(prod.atoms)):
        prod.atoms[k]["map"] = k + 1
    formed = []
    for (pa, ia, pb, ib, sym) in links:
        a, b = offs[pa] + ia, offs[pb] + ib
        prod.bond(a, b, sym)
        formed.append((a, b))
    reac = Mol()
    reac.merge(prod)
    for (a, b) in formed:
        del reac.bonds[frozenset((a, b))]
    for (site, lg, lg_atom, sym) in leaving:
        atom = [offs[p] + i for p, i in [site]][0]
        off = reac.merge(frag(lg))
        reac.bond(atom, off + lg_atom, sym)
    return "%s>>%s\t%d" % (write(reac), write(prod), cls)


def zero_center(product, site, group, group_atom, cls, sym="-"):
    prod = frag(product)
    for k in range(len(prod.atoms)):
        prod.atoms[k]["map"] = k + 1
    reac = Mol()
    reac.merge(prod)
    off = reac.merge(frag(group))
    reac.bond(site, off + group_atom, sym)
    return "%s>>%s\t%d" % (write(reac), write(prod), cls)


# Each pool feeds one role, so a synthon always comes from the same reactant.
ALCOHOLS = ["Oc1ccccc1", "OCC", "Oc1ccc(C)cc1", "OCc1ccccc1", "Oc1ccc(Cl)cc1", "OC1CCCC1"]
ALKYLS = ["CC", "Cc1ccccc1", "CCC", "CC(C)C", "CCOC"]
AMINES = ["N1CCOCC1", "N1CCCC1", "NCc1ccccc1", "N(C)C", "NC1CC1", "Nc1ccccc1"]
ACYLS = ["C(=O)C", "C(=O)c1ccccc1", "C(=O)CC", "C(=O)c1ccncc1", "C(=O)C1CC1"]
ACIDS = ["C(=O)c1ccc(C)cc1", "C(=O)CC(C)C", "C(=O)c1ccc(Cl)cc1"]
BORONICS = ["c1ccccc1", "c1ccc(C)cc1", "c1ccc(OC)cc1"]
BROMOARYLS = ["c1ccncc1", "c1ccsc1", "c1cncnc1"]
IODOARYLS = ["c1ccc(F)cc1", "c1ccc(Cl)cc1", "c1cccc(C)c1"]
SNAR_ARYLS = ["c1ncccn1", "c1ccc(C=O)cc1", "c1nccs1"]
ALKYNES = ["C#Cc1ccccc1", "C#CC", "C#CCO"]
SULFONYLS = ["S(=O)(=O)c1ccccc1", "S(=O)(=O)C", "S(=O)(=O)c1ccc(C)cc1"]


def williamson(al, ak):
    return reaction([al, ak], [(0, 0, 1, 0, "-")], [((1, 0), "Br", 0, "-")], 1)


def n_alkylation(am, ak):
    return reaction([am, ak], [(0, 0, 1, 0, "-")], [((1, 0), "Br", 0, "-")], 1)


def amide(am, ac):
    return reaction([am, ac], [(0, 0, 1, 0, "-")], [((1, 0), "Cl", 0, "-")], 2)


def ester(al, ac):
    return reaction([al, ac], [(0, 0, 1, 0, "-")], [((1, 0), "O", 0, "-")], 2)


def suzuki(a1, a2):
    return reaction([a1, a2], [(0, 0, 1, 0, "-")],
                    [((0, 0), "B(O)O", 0, "-"), ((1, 0), "Br", 0, "-")], 3)


def sulfonamide(am, so):
    return reaction([am, so], [(0, 0, 1, 0, "-")], [((1, 0), "Cl", 0, "-")], 2)


def snar(am, ar):
    return reaction([am, ar], [(0, 0, 1, 0, "-")], [((1, 0), "F", 0, "-")], 1)


def sonogashira(ar, yne):
    return reaction([ar, yne], [(0, 0, 1, 0, "-")], [((0, 0), "I", 0, "-")], 3)


def boc(am):
    return zero_center(am, 0, "C(=O)OC(C)(C)C", 0, 6)


def hydrolysis(acyl):
    # acyl starts with "C(=O)"; the acid oxygen becomes atom 1.
    return zero_center(acyl[:1] + "(O)" + acyl[1:], 1, "C", 0, 6)


def ketal(ketone):
    # ketone carbon (atom 0) joined to both oxygens of a glycol.
    return reaction([ketone, "OCCO"], [(0, 0, 1, 0, "-"), (0, 0, 1, 3, "-")],
                    [((0, 0), "O", 0, "=")], 5)


def main():
    # Single-center reactions first; they form the overfit subset.
    rows = []
    singles = [
        williamson(ALCOHOLS[0], ALKYLS[0]), n_alkylation(AMINES[0], ALKYLS[1]),
        amide(AMINES[1], ACYLS[0]), ester(ALCOHOLS[1], ACIDS[0]),
        suzuki(BORONICS[0], BROMOARYLS[0]), sulfonamide(AMINES[2], SULFONYLS[0]),
        snar(AMINES[3], SNAR_ARYLS[0]), sonogashira(IODOARYLS[0], ALKYNES[0]),
        williamson(ALCOHOLS[2], ALKYLS[2]), n_alkylation(AMINES[4], ALKYLS[0]),
        amide(AMINES[5], ACYLS[1]), ester(ALCOHOLS[3], ACIDS[1]),
        suzuki(BORONICS[1], BROMOARYLS[1]), sulfonamide(AMINES[0], SULFONYLS[1]),
        snar(AMINES[1], SNAR_ARYLS[1]), sonogashira(IODOARYLS[1], ALKYNES[1]),
        williamson(ALCOHOLS[4], ALKYLS[3]), amide(AMINES[2], ACYLS[2]),
        boc(AMINES[1]), hydrolysis(ACIDS[0]),
    ]
    rows += singles
    more = [
        williamson(ALCOHOLS[5], ALKYLS[4]), n_alkylation(AMINES[1], ALKYLS[2]),
        amide(AMINES[3], ACYLS[3]), ester(ALCOHOLS[5], ACIDS[2]),
        suzuki(BORONICS[2], BROMOARYLS[2]), sulfonamide(AMINES[4], SULFONYLS[2]),
        snar(AMINES[0], SNAR_ARYLS[2]), sonogashira(IODOARYLS[2], ALKYNES[2]),
        williamson(ALCOHOLS[0], ALKYLS[1]), n_alkylation(AMINES[2], ALKYLS[3]),
        amide(AMINES[0], ACYLS[4]), ester(ALCOHOLS[2], ACIDS[0]),
        suzuki(BORONICS[0], BROMOARYLS[1]), sulfonamide(AMINES[5], SULFONYLS[0]),
        snar(AMINES[4], SNAR_ARYLS[1]), sonogashira(IODOARYLS[0], ALKYNES[1]),
        boc(AMINES[0]), boc(AMINES[4]), hydrolysis(ACIDS[1]), hydrolysis(ACIDS[2]),
        ketal("C(C)C"), ketal("C(C)c1ccccc1"), ketal("C(CC)CC"),
        williamson(ALCOHOLS[3], ALKYLS[0]), amide(AMINES[1], ACYLS[1]),
        ester(ALCOHOLS[4], ACIDS[1]), n_alkylation(AMINES[5], ALKYLS[1]),
        suzuki(BORONICS[1], BROMOARYLS[2]), snar(AMINES[2], SNAR_ARYLS[0]),
        sonogashira(IODOARYLS[2], ALKYNES[0]),
    ]
    rows += more
    assert len(rows) == 50 and len(set(rows)) == 50
    out = sys.stdout if len(sys.argv) < 2 else open(sys.argv[1], "w")
    out.write("# reactants>>product<TAB>class; generated by tools/make_desk_corpus.py\n")
    for r in rows:
        out.write(r + "\n")


if __name__ == "__main__":
    main()
