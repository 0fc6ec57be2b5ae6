import json

import pytest
from hypothesis import given, settings, strategies as st

from carmex import store
from carmex.carmichael import CarmichaelRecord
from carmex.runner import run_enumeration, run_fingerprint
from carmex.search import SearchConfig

R561 = CarmichaelRecord(561, (3, 11, 17))


@pytest.fixture(scope="module")
def pool(carmichael_1e5):
    return carmichael_1e5


def test_dumps_examples():
    text = store.dumps(store.write([R561], limit=1000))
    assert text.splitlines()[-1] == "561 3 11 17"
    assert text.splitlines()[0] == "# carmichael-v1"
    empty = store.dumps(store.write([], limit=1000))
    assert all(line.startswith("#") for line in empty.splitlines())


def test_round_trip(tmp_path, pool):
    path = tmp_path / "x.txt"
    rf = store.write(pool, path, limit=10**5, strategy="oracle", unit="all")
    back = store.read(path)
    assert back == rf
    assert store.dumps(back) == path.read_text()


@pytest.mark.parametrize("line, message", [
    ("9 3 3", "not squarefree"),
    ("561 3 11 19", "do not multiply"),
    ("561 11 3 17", "not ascending"),
    ("341 11 31", "fewer than three"),
    ("1155 3 5 7 11", "Korselt"),
    ("561 x 11 17", "malformed"),
])
def test_tampered_lines_are_rejected(line, message):
    text = "# carmichael-v1\n# limit 100000\n" + line + "\n"
    with pytest.raises(store.StoreError, match=message):
        store.loads(text)


def test_load_checks_order_and_limit():
    head = "# carmichael-v1\n# limit 100000\n"
    with pytest.raises(store.StoreError, match="out of order"):
        store.loads(head + "1105 5 13 17\n561 3 11 17\n")
    with pytest.raises(store.StoreError, match="exceeds limit"):
        store.loads("# carmichael-v1\n# limit 1000\n1105 5 13 17\n")
    with pytest.raises(store.StoreError):
        store.loads("561 3 11 17\n")
    with pytest.raises(store.StoreError):
        store.loads("# carmichael-v9\n# limit 1000\n")


def test_composite_factor_is_rejected():
    # 561 = 3*187 multiplies out but 187 = 11*17 is not prime
    text = "# carmichael-v1\n# limit 1000\n561 3 187\n"
    with pytest.raises(store.StoreError):
        store.loads(text)


def subsets(pool):
    return st.lists(st.sampled_from(pool), unique=True).map(sorted)


@given(st.data())
@settings(max_examples=60)
def test_merge_laws(pool, data):
    a, b, c = (store.write(data.draw(subsets(pool)), limit=10**5) for _ in range(3))
    assert store.merge([a, a]).records == a.records
    assert store.merge([a, b]).records == store.merge([b, a]).records
    left = store.merge([store.merge([a, b]), c])
    right = store.merge([a, store.merge([b, c])])
    assert left.records == right.records == sorted(set(a.records) | set(b.records) | set(c.records))


def test_merge_examples(pool):
    tree = store.write([r for r in pool if r.primes[-1] <= 100], limit=10**5, strategy="enumerate")
    big = store.write([r for r in pool if r.primes[-1] > 100], limit=10**5, strategy="scan")
    merged = store.merge([tree, big])
    assert len(merged.records) == 16
    assert merged.strategy == "merge"


def test_merge_refuses_mismatches():
    with pytest.raises(store.StoreError):
        store.merge([store.write([], limit=10**5), store.write([], limit=10**6)])
    with pytest.raises(store.StoreError):
        store.merge([])


# ---- checkpoints

def test_checkpoint_interrupt_and_resume(tmp_path):
    cfg = SearchConfig(limit=10**7, split=1000)
    full = run_enumeration(cfg)
    ck = tmp_path / "run.ckpt"
    partial = run_enumeration(cfg, checkpoint=ck, stop_after=2)
    assert len(json.loads(ck.read_text())["completed"]) == 2
    assert set(partial) < set(full)
    seen = []
    resumed = run_enumeration(cfg, checkpoint=ck, progress=lambda uid, k: seen.append(uid))
    assert resumed == full
    assert "s:3" not in seen and "s:5" not in seen
    assert store.dumps(store.write(resumed, limit=cfg.limit)) == store.dumps(store.write(full, limit=cfg.limit))


def test_checkpoint_refuses_changed_config(tmp_path):
    ck = tmp_path / "run.ckpt"
    run_enumeration(SearchConfig(limit=10**6), checkpoint=ck, stop_after=1)
    with pytest.raises(store.CheckpointMismatch):
        run_enumeration(SearchConfig(limit=2 * 10**6), checkpoint=ck)


def test_empty_checkpoint_means_full_run(tmp_path):
    cfg = SearchConfig(limit=10**6)
    ck = store.checkpoint_resume(tmp_path / "missing", run_fingerprint(cfg))
    assert ck.completed == {}
    assert run_enumeration(cfg, checkpoint=tmp_path / "fresh") == run_enumeration(cfg)


def test_fingerprint_is_stable():
    a = store.fingerprint(SearchConfig(limit=10**6))
    assert a == store.fingerprint(SearchConfig(limit=10**6))
    assert a != store.fingerprint(SearchConfig(limit=10**6, threshold=65))
    assert store.fingerprint({"b": 1, "a": 2}) == store.fingerprint({"a": 2, "b": 1})
