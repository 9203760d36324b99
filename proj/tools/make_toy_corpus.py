#!/usr/bin/env python3
"""Writes the bundled toy corpus (data/toy_corpus.jsonl) and vocabulary (data/toy_vocab.tsv).

Documents are year-stamped abstracts about machine learning. Entity mentions come from six
topic groups whose pairing shifts over 1985-2015, so co-occurrence structure evolves. About a
fifth of the documents are off-topic and never match the default query.
Deterministic: rerunning produces identical files.
"""
import argparse
import json
import random
from pathlib import Path

GROUPS = {
    "neural": [("neural_network", ["neural network", "neural net"]),
               ("backpropagation", ["backpropagation", "backprop"]),
               ("perceptron", ["perceptron"]),
               ("hidden_layer", ["hidden layer"]),
               ("activation_function", ["activation function"])],
    "kernel": [("svm", ["support vector machine", "svm"]),
               ("kernel_trick", ["kernel trick"]),
               ("margin", ["maximum margin"]),
               ("rbf_kernel", ["rbf kernel", "gaussian kernel"]),
               ("quadratic_program", ["quadratic programming"])],
    "bayes": [("bayesian_network", ["bayesian network"]),
              ("graphical_model", ["graphical model"]),
              ("em_algorithm", ["em algorithm", "expectation maximization"]),
              ("hidden_markov_model", ["hidden markov model", "hmm"]),
              ("variational_inference", ["variational inference"])],
    "ensemble": [("random_forest", ["random forest"]),
                 ("boosting", ["boosting", "adaboost"]),
                 ("decision_tree", ["decision tree"]),
                 ("bagging", ["bagging"]),
                 ("gradient_boosting", ["gradient boosting"])],
    "deep": [("deep_learning", ["deep learning"]),
             ("convolutional_network", ["convolutional neural network", "cnn"]),
             ("dropout", ["dropout"]),
             ("gpu", ["gpu"]),
             ("recurrent_network", ["recurrent neural network", "lstm"])],
    "data": [("imagenet", ["imagenet"]),
             ("mnist", ["mnist"]),
             ("benchmark_dataset", ["benchmark dataset"]),
             ("cross_validation", ["cross validation"]),
             ("feature_selection", ["feature selection"])],
}

# Which topic groups dominate each era.
ERAS = [(1985, 1994, ["neural", "bayes", "data"]),
        (1995, 2004, ["kernel", "bayes", "ensemble", "data"]),
        (2005, 2015, ["deep", "ensemble", "neural", "data"])]

FILLER = ("we study propose method results show approach model paper new improved analysis experiments "
          "performance evaluation algorithm framework task problem general setting empirical theory").split()
OFF_TOPIC = ("protein folding enzyme kinetics river sediment transport urban traffic flow poetry meter "
             "medieval trade routes glacier retreat coral reef survey").split()


def era_groups(year):
    for lo, hi, groups in ERAS:
        if lo <= year <= hi:
            return groups
    raise ValueError(year)


def on_topic(rng, year):
    groups = era_groups(year)
    words = [rng.choice(FILLER) for _ in range(rng.randint(25, 45))]
    for _ in range(rng.randint(1, 3)):
        words.insert(rng.randrange(len(words) + 1), rng.choice(["machine learning", "learning"]))
    for group in rng.sample(groups, 2):
        for entity, surfaces in rng.sample(GROUPS[group], rng.randint(2, 4)):
            for _ in range(rng.randint(1, 3)):
                words.insert(rng.randrange(len(words) + 1), rng.choice(surfaces))
    return " ".join(words) + "."


def off_topic(rng):
    return " ".join(rng.choice(OFF_TOPIC + FILLER) for _ in range(rng.randint(20, 40))) + "."


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    parser.add_argument("--docs", type=int, default=200)
    parser.add_argument("--seed", type=int, default=1985)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "toy_corpus.jsonl", "w", encoding="utf-8") as f:
        for k in range(args.docs):
            year = rng.randint(1985, 2015)
            text = off_topic(rng) if rng.random() < 0.2 else on_topic(rng, year)
            f.write(json.dumps({"id": f"doc{k:04d}", "text": text, "ordinal": year}) + "\n")
    with open(args.out / "toy_vocab.tsv", "w", encoding="utf-8") as f:
        f.write("# surface\tentityId\n")
        for group in GROUPS.values():
            for entity, surfaces in group:
                for s in surfaces:
                    f.write(f"{s}\t{entity}\n")


if __name__ == "__main__":
    main()
