"""
Caption metric suite
====================

BLEU-4, ROUGE-L, METEOR, and tf-idf consensus (CIDEr) over one shared
tokenizer. The same METEOR feeds both evaluation and the caption reward, so
reward values and reported metrics agree exactly.
"""

from chronusav import bleu4, build_idf_corpus, cider, meteor, rouge_l, tokenize

references = [
    "a man slices red tomatoes over a wooden board",
    "kids playing beside a fountain",
    "sea waves breaking on the rocks",
    "the drummer plays a fast beat",
]
predictions = [
    "a man slices ripe tomatoes on the wooden board",
    "children play near the fountain",
    "waves crash against dark rocks",
    "a drummer keeps steady rhythm",
]

docs = [tokenize(r) for r in references]
corpus = build_idf_corpus(docs)

print(f"{'BLEU-4':>8} {'ROUGE-L':>8} {'METEOR':>8} {'CIDEr':>8}")
for pred_text, ref in zip(predictions, docs):
    pred = tokenize(pred_text)
    print(
        f"{bleu4(pred, [ref]):8.4f} {rouge_l(pred, ref):8.4f} "
        f"{meteor(pred, ref):8.4f} {cider(pred, [ref], corpus):8.4f}"
        f"   {pred_text!r}"
    )

# Identity behavior: BLEU and ROUGE reach exactly 1; METEOR's fragmentation
# penalty leaves 1 - 0.5/m^3 even for a perfect m-token caption.
same = tokenize("steam rises from a copper pot")
print("\nidentity:", bleu4(same, [same]), rouge_l(same, same), meteor(same, same))
