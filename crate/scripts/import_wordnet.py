#!/usr/bin/env python3
"""Export a WordNet database directory to the portable lexicon format.

Reads the standard index.<pos>/data.<pos> pair (WordNet 1.6 through 3.x
layouts) and writes SYNSET/REL/INDEX records; synset keys are the data
file offsets. Hypernym pointers (@ and @i) become REL records. An
optional WordNet-Domains mapping file (lines like
"00001740-n<TAB>factotum") adds DOMAIN records.

Usage:
    import_wordnet.py WNSEARCHDIR [--pos noun verb adj adv] \
        [--domains wn-domains.txt] [--out lexicon.lex]
"""
import argparse
import sys
from pathlib import Path

POS_TAG = {"noun": "N", "verb": "V", "adj": "A", "adv": "R"}
SS_TYPE_TAG = {"n": "N", "v": "V", "a": "A", "s": "A", "r": "R"}


def clean_word(word):
    # strip adjective syntax markers like word(a) / word(ip)
    if word.endswith(")") and "(" in word:
        word = word[: word.rindex("(")]
    return word.replace("_", " ").lower()


def parse_data(path):
    """Yields (key, lemmas, gloss, hypernym (pos, offset) pairs)."""
    for line in path.open(encoding="latin-1"):
        if line.startswith(" ") or not line.strip():
            continue
        payload, _, gloss = line.partition("|")
        fields = payload.split()
        offset = fields[0]
        w_cnt = int(fields[3], 16)
        words = [clean_word(fields[4 + 2 * i]) for i in range(w_cnt)]
        rest = fields[4 + 2 * w_cnt :]
        p_cnt = int(rest[0])
        hypernyms = []
        for i in range(p_cnt):
            symbol, target, pos_char = rest[1 + 4 * i : 4 + 4 * i]
            if symbol in ("@", "@i"):
                hypernyms.append((SS_TYPE_TAG[pos_char], target))
        yield offset, words, gloss.strip(), hypernyms


def parse_index(path):
    """Yields (lemma, [offsets in frequency order])."""
    for line in path.open(encoding="latin-1"):
        if line.startswith(" ") or not line.strip():
            continue
        fields = line.split()
        lemma = clean_word(fields[0])
        synset_cnt = int(fields[2])
        p_cnt = int(fields[3])
        offsets = fields[3 + p_cnt + 3 :]
        yield lemma, offsets[:synset_cnt]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("wndir", type=Path, help="WordNet database directory (dict/)")
    ap.add_argument("--pos", nargs="+", default=["noun"], choices=sorted(POS_TAG))
    ap.add_argument("--domains", type=Path, help="WordNet-Domains mapping file")
    ap.add_argument("--out", type=Path, help="output path (default stdout)")
    args = ap.parse_args()

    out = args.out.open("w", encoding="utf-8") if args.out else sys.stdout
    known = set()
    rels = []
    for pos in args.pos:
        tag = POS_TAG[pos]
        data = args.wndir / f"data.{pos}"
        if not data.exists():
            sys.exit(f"import_wordnet: {data} not found")
        for offset, words, gloss, hypernyms in parse_data(data):
            known.add((tag, offset))
            print(f"SYNSET\t{tag}\t{offset}\t{','.join(words)}\t{gloss}", file=out)
            for hpos, hoffset in hypernyms:
                rels.append((tag, offset, hpos, hoffset))

    for tag, offset, hpos, hoffset in rels:
        # cross-POS pointers to parts of speech we did not export would dangle
        if (hpos, hoffset) in known:
            print(f"REL\thypernym\t{tag}:{offset}\t{hpos}:{hoffset}", file=out)

    if args.domains:
        for line in args.domains.open(encoding="utf-8"):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, labels = line.partition("\t")
            offset, _, pos_char = key.partition("-")
            tag = SS_TYPE_TAG.get(pos_char)
            if tag and (tag, offset) in known:
                for label in labels.split():
                    print(f"DOMAIN\t{tag}:{offset}\t{label}", file=out)

    for pos in args.pos:
        tag = POS_TAG[pos]
        index = args.wndir / f"index.{pos}"
        if not index.exists():
            continue
        for lemma, offsets in parse_index(index):
            keys = [o for o in offsets if (tag, o) in known]
            if keys:
                print(f"INDEX\t{lemma}\t{tag}\t{','.join(keys)}", file=out)

    if args.out:
        out.close()


if __name__ == "__main__":
    main()
