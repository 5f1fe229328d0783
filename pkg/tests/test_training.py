import numpy as np
import pytest

from intentcite.embeddings import EmbeddingSet
from intentcite.errors import ValidationError
from intentcite.gan.benchmark import make_blobs, run_gain_benchmark
from intentcite.gan.nets import flatten_layers, init_model
from intentcite.gan.optim import lr_multiplier
from intentcite.gan.training import TrainConfig, train, write_train_log
from intentcite.records import CitationRecord
from intentcite.splits import DatasetSplit, make_split


def _toy_problem(seed=0, n=60, dim=6, k=3):
    X, y = make_blobs(seed, n=n, dim=dim, n_classes=k, separation=2.5)
    records, labels = [], {}
    embeddings = EmbeddingSet(dim=dim)
    for i in range(n):
        rid = str(i)
        records.append(CitationRecord(rid, "", "", "", gold_intent=int(y[i])))
        embeddings.add(rid, X[i])
        labels[rid] = int(y[i])
    split = make_split(records, 0.5, seed, dev_fraction=0.2)
    return split, embeddings, labels


def _config(seed=0, epochs=3):
    return TrainConfig(
        batch_size=16,
        lr_discriminator=1e-3,
        lr_generator=1e-3,
        adam_epsilon=1e-8,
        epochs=epochs,
        warmup_proportion=0.1,
        seed=seed,
    )


def _model(seed=0, dim=6, k=3):
    return init_model(k=k, embedding_dim=dim, z_dim=dim, dropout=0.1, seed=seed)


def test_zero_epochs_is_a_no_op():
    split, embeddings, labels = _toy_problem()
    model = _model()
    before = flatten_layers(model.discriminator.layers).copy()
    result = train(model, split, embeddings, labels, _config(epochs=0))
    assert result.log == []
    assert result.model is model
    assert np.array_equal(before, flatten_layers(model.discriminator.layers))


def test_training_is_deterministic_for_fixed_seed():
    split, embeddings, labels = _toy_problem()
    runs = []
    for _ in range(2):
        result = train(_model(), split, embeddings, labels, _config())
        runs.append(result)
    a, b = runs
    assert [r.l_sup for r in a.log] == [r.l_sup for r in b.log]
    assert [r.l_unsup for r in a.log] == [r.l_unsup for r in b.log]
    assert [r.l_g for r in a.log] == [r.l_g for r in b.log]
    assert (
        flatten_layers(a.model.discriminator.layers).tobytes()
        == flatten_layers(b.model.discriminator.layers).tobytes()
    )
    assert (
        flatten_layers(a.model.generator.layers).tobytes()
        == flatten_layers(b.model.generator.layers).tobytes()
    )


def test_different_seed_changes_the_run():
    split, embeddings, labels = _toy_problem()
    a = train(_model(), split, embeddings, labels, _config(seed=0))
    b = train(_model(), split, embeddings, labels, _config(seed=1))
    assert [r.l_sup for r in a.log] != [r.l_sup for r in b.log]


def test_missing_embedding_names_the_record():
    split, embeddings, labels = _toy_problem()
    incomplete = EmbeddingSet(dim=embeddings.dim)
    for rid, vec in embeddings.rows.items():
        if rid != split.labeled_train[0]:
            incomplete.add(rid, vec)
    with pytest.raises(ValidationError, match=split.labeled_train[0]):
        train(_model(), split, incomplete, labels, _config())


def test_best_dev_checkpoint_retained():
    split, embeddings, labels = _toy_problem()
    result = train(_model(), split, embeddings, labels, _config(epochs=6))
    best_logged = max(r.dev_macro_f1 for r in result.log)
    assert result.log[result.best_epoch - 1].dev_macro_f1 == best_logged

    from intentcite.gan.training import _dev_macro_f1

    x_dev = embeddings.matrix(list(split.dev))
    y_dev = np.array([labels[i] for i in split.dev])
    recomputed = _dev_macro_f1(result.model, x_dev, y_dev, 3)
    assert recomputed == pytest.approx(best_logged, abs=1e-12)


def test_supervised_only_leaves_generator_alone():
    split, embeddings, labels = _toy_problem()
    model = _model()
    gen_before = flatten_layers(model.generator.layers).copy()
    result = train(model, split, embeddings, labels, _config(), semi_supervised=False)
    assert np.array_equal(gen_before, flatten_layers(result.model.generator.layers))
    assert all(r.l_unsup == 0.0 for r in result.log)
    assert all(r.l_g == 0.0 for r in result.log)


def test_semi_supervised_gain_single_seed():
    semi = run_gain_benchmark(0, semi_supervised=True)
    supervised = run_gain_benchmark(0, semi_supervised=False)
    assert semi >= supervised


def test_lr_schedule_shape():
    total, warmup = 100, 0.1
    mults = [lr_multiplier(s, total, warmup) for s in range(total)]
    assert mults[0] == pytest.approx(0.1)
    assert mults[9] == pytest.approx(1.0)
    assert all(a >= b for a, b in zip(mults[9:], mults[10:]))  # decays after warmup
    assert mults[-1] > 0.0


def test_train_log_csv(tmp_path):
    split, embeddings, labels = _toy_problem()
    result = train(_model(), split, embeddings, labels, _config(epochs=2))
    path = tmp_path / "log.csv"
    write_train_log(result.log, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "epoch,L_sup,L_unsup,L_G,dev_macro_f1"
    assert len(lines) == 3
    assert lines[1].startswith("1,")


def test_rejects_label_out_of_range():
    split, embeddings, labels = _toy_problem()
    labels = dict(labels)
    labels[split.labeled_train[0]] = 7
    with pytest.raises(ValidationError, match="out of range"):
        train(_model(), split, embeddings, labels, _config())
