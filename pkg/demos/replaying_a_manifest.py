"""
Reproducible runs from a manifest
=================================

A RunManifest pins everything a run depends on: input paths with their
SHA-256 digests, the context window, the embedding and training
configurations, the split seed, and the statistics seeds.  Replaying the
same manifest writes byte-identical results; touching an input makes the
replay refuse to run.
"""

import hashlib
import tempfile
from pathlib import Path

from gendervec import lexicon, synthetic
from gendervec.classifier import TrainConfig
from gendervec.cooccurrence import ContextConfig
from gendervec.embedding import EmbeddingConfig
from gendervec.errors import DataError
from gendervec.pipeline import build_manifest, load_manifest, run_from_manifest, save_manifest

workdir = Path(tempfile.mkdtemp(prefix="gendervec_demo_"))
spec = synthetic.SyntheticSpec(noun_count=300, sentence_count=20_000, seed=2, filler_count=6)
language = synthetic.generate_synthetic_language(spec)
synthetic.write_corpus(language, workdir / "corpus.txt")
lexicon.save_lexicon(language.lexicon, workdir / "lexicon.tsv")

manifest = build_manifest(
    workdir / "corpus.txt",
    workdir / "lexicon.tsv",
    ContextConfig(context_type="asymmetric_backward", window_size=1),
    EmbeddingConfig(k=10, seed=0),
    TrainConfig(max_epochs=80, hidden_size=16, patience=20, batch_size=32),
    n_perm=2_000,
)
save_manifest(manifest, workdir / "manifest.json")
print(f"corpus digest {manifest.corpus_sha256[:16]}...")

# Round-trip through JSON and run twice.
manifest = load_manifest(workdir / "manifest.json")
first = run_from_manifest(manifest, workdir / "run_a")
second = run_from_manifest(manifest, workdir / "run_b")

def digest(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()

for name in ("eval_report.json", "split_manifest.json", "records.csv", "model.bin"):
    same = digest(first[name]) == digest(second[name])
    print(f"  {name:20s} {'identical' if same else 'DIFFERS'}")

# Append one byte to the corpus and the digest check balks.
with open(workdir / "corpus.txt", "a", encoding="utf-8") as fh:
    fh.write("\n")
try:
    run_from_manifest(manifest, workdir / "run_c")
except DataError as exc:
    print(f"tampered input rejected: {str(exc)[:60]}...")
