#!/usr/bin/env python3
"""Hand oracle for the domains fixture: recomputes the association-ratio
lexicon and the cosine scores from first principles so the expected
disambiguation outcomes can be frozen into tests."""
import math
import re
import sys
from collections import Counter, defaultdict

STOP = set("""a an the and or but if of in on at by for with to from as is are
was were be been being that this these those it its he she his her they them
who whom which what not no any some all my your our their has""".split())


def tokens(gloss):
    out = []
    for tok in re.split(r"[^0-9a-zA-Z]+", gloss.lower()):
        if len(tok) >= 2 and tok not in STOP:
            out.append(tok)
    return out


def load(path):
    synsets = {}
    domains = defaultdict(list)
    for line in open(path):
        line = line.rstrip("\n")
        if not line or line.startswith("#"):
            continue
        f = line.split("\t")
        if f[0] == "SYNSET":
            synsets[f[1] + ":" + f[2]] = f[4] if len(f) > 4 else ""
        elif f[0] == "DOMAIN":
            domains[f[1]].append(f[2])
    return synsets, domains


def build(synsets, domains):
    word_total = Counter()
    dom_word = defaultdict(Counter)
    dom_total = Counter()
    grand = 0
    for sid, gloss in synsets.items():
        toks = tokens(gloss)
        grand += len(toks)
        for t in toks:
            word_total[t] += 1
        for d in domains.get(sid, []):
            dom_total[d] += len(toks)
            for t in toks:
                dom_word[d][t] += 1
    lex = defaultdict(list)
    for d, wc in dom_word.items():
        for w, c in wc.items():
            pwd = c / dom_total[d]
            pw = word_total[w] / grand
            ar = pwd * math.log(pwd / pw)
            if ar > 0:
                lex[w].append((d, ar))
    for w in lex:
        lex[w].sort(key=lambda e: (-e[1], e[0]))
    return lex


def vector(words, lex, k=8):
    v = Counter()
    for w in words:
        for d, ar in lex.get(w, [])[:k]:
            v[d] += ar
    return v


def cosine(a, b):
    dot = sum(a[d] * b.get(d, 0.0) for d in a)
    na = math.sqrt(sum(x * x for x in a.values()))
    nb = math.sqrt(sum(x * x for x in b.values()))
    if na == 0 or nb == 0:
        return 0.0
    return dot / (na * nb)


def main():
    synsets, domains = load(sys.argv[1])
    lex = build(synsets, domains)

    for word, ctx, senses in [
        ("genotype", ["chromosome", "genotype", "phenotype", "organism"],
         ["N:genotype1", "N:genotype2"]),
        ("bank", ["bank", "money", "deposit"], ["N:bank1", "N:bank2"]),
    ]:
        cv = vector(ctx, lex)
        print(f"== {word}  CV={dict(cv)}")
        for s in senses:
            sv = vector(tokens(synsets[s]), lex)
            print(f"  {s}: cos={cosine(sv, cv):.6f}  SV={dict(sv)}")

    print("\nsample AR entries:")
    for w in ["genetic", "organism", "money", "sloping", "land"]:
        print(f"  {w}: {[(d, round(ar, 6)) for d, ar in lex.get(w, [])]}")


if __name__ == "__main__":
    main()
