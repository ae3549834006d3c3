"""Command-line interface for the encrypted-inference pipeline.

Subcommands: keygen, enc, dkgen, infer, bench.  Every failure exits with
a class-specific code and a single machine-parseable diagnostic line on
stderr (``quadfe: error=<Type> detail=<message>``).
"""

import functools
import json
import pathlib
import random
import statistics
import sys
import time

import click

from . import dlog, model_io, quadnet
from .errors import FormatError, QfeError, ValidationError
from .group import setup_group
from .qfe import setup as fe_setup
from .quantize import QuantMeta, quantize_input, score_bound


def _fail(exc):
    click.echo(f"quadfe: error={type(exc).__name__} detail={exc}", err=True)
    sys.exit(getattr(exc, "exit_code", 1))


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except QfeError as exc:
            _fail(exc)
        except OSError as exc:
            _fail(FormatError(str(exc), section="io"))

    return wrapper


def _rng(insecure_test, seed):
    if seed is not None and not insecure_test:
        raise click.UsageError("--seed requires --insecure-test")
    if insecure_test and seed is not None:
        return random.Random(seed)
    return random.SystemRandom()


def read_pgm(path):
    """Read a binary (P5) PGM file and return its pixels, row-major."""
    data = pathlib.Path(path).read_bytes()
    pos = 0

    def token():
        nonlocal pos
        while pos < len(data):
            if data[pos:pos + 1].isspace():
                pos += 1
            elif data[pos:pos + 1] == b"#":
                while pos < len(data) and data[pos] != 0x0A:
                    pos += 1
            else:
                break
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError("unexpected end of header", section="pgm")
        return data[start:pos]

    if token() != b"P5":
        raise FormatError("not a binary PGM (P5) file", section="pgm")
    try:
        width, height, maxval = int(token()), int(token()), int(token())
    except ValueError:
        raise FormatError("malformed header field", section="pgm") from None
    if not 0 < maxval <= 255:
        raise FormatError(f"unsupported maxval {maxval}", section="pgm")
    pos += 1  # single whitespace after maxval
    pixels = data[pos:pos + width * height]
    if len(pixels) < width * height:
        raise FormatError("truncated pixel data", section="pgm")
    return list(pixels)


def write_pgm(path, pixels, width, height, maxval=255):
    header = f"P5\n{width} {height}\n{maxval}\n".encode()
    pathlib.Path(path).write_bytes(header + bytes(pixels))


def _read_image(path):
    if str(path).endswith(".json"):
        vals = json.loads(pathlib.Path(path).read_text())
        if not isinstance(vals, list):
            raise FormatError("JSON image must be a flat array", section="image")
        return [int(v) for v in vals]
    return read_pgm(path)


def _load_keys_dir(keys_dir, ctx):
    paths = sorted(pathlib.Path(keys_dir).glob("dk_*.qdk"))
    if not paths:
        raise FormatError(f"no dk_*.qdk files in {keys_dir}", section="keys")
    loaded = [model_io.load_dk(p, ctx) for p in paths]
    loaded.sort(key=lambda pair: pair[1])
    return [dk for dk, _ in loaded]


@click.group()
def main():
    """Functional-encryption toolkit for encrypted quadratic networks."""


def _seed_options(fn):
    fn = click.option("--seed", type=int, default=None, help="Deterministic RNG seed (test only).")(fn)
    fn = click.option("--insecure-test", is_flag=True, help="Allow a seeded, non-cryptographic RNG.")(fn)
    return fn


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@_seed_options
@_handle_errors
def keygen(model_path, out_dir, insecure_test, seed):
    """Generate pk, msk and one functional key per model class."""
    rng = _rng(insecure_test, seed)
    model, _ = model_io.load_model(model_path)
    ctx = setup_group(128)
    fc = model.function_class()
    t0 = time.perf_counter()
    pk, msk = fe_setup(fc, ctx, rng)
    keys = quadnet.keygen_model(msk, model, ctx)
    elapsed = time.perf_counter() - t0
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    model_io.save_pk(pk, out / "pk.qpk", model.quant.input_bits, model.quant.bits)
    model_io.save_msk(msk, ctx, out / "msk.qmsk")
    for i, dk in enumerate(keys):
        model_io.save_dk(dk, ctx, out / f"dk_{i:03d}.qdk", index=i)
    click.echo(f"keygen wrote {2 + len(keys)} files to {out_dir} in {elapsed:.3f}s")


@main.command()
@click.option("--msk", "msk_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@_handle_errors
def dkgen(msk_path, model_path, out_dir):
    """Derive the per-class functional keys from an existing msk."""
    model, _ = model_io.load_model(model_path)
    ctx = setup_group(128)
    msk = model_io.load_msk(msk_path, ctx)
    t0 = time.perf_counter()
    keys = quadnet.keygen_model(msk, model, ctx)
    elapsed = time.perf_counter() - t0
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i, dk in enumerate(keys):
        model_io.save_dk(dk, ctx, out / f"dk_{i:03d}.qdk", index=i)
    click.echo(f"dkgen wrote {len(keys)} keys to {out_dir} in {elapsed:.3f}s")


@main.command()
@click.option("--pk", "pk_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--image", "image_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@_seed_options
@_handle_errors
def enc(pk_path, image_path, out_path, insecure_test, seed):
    """Encrypt a grayscale image under a public key."""
    rng = _rng(insecure_test, seed)
    ctx = setup_group(128)
    pk, input_bits, weight_bits = model_io.load_pk(pk_path, ctx)
    meta = QuantMeta(bits=weight_bits, input_bits=input_bits)
    pixels = _read_image(image_path)
    from .qfe import FunctionClass

    fc = FunctionClass(
        n=pk.n, b_x=max(1, meta.input_max), b_y=max(1, meta.input_max),
        b_q=max(1, meta.weight_max),
    )
    x = quantize_input(pixels, input_bits)
    t0 = time.perf_counter()
    ct = quadnet.encrypt_input(pk, x, fc, rng)
    elapsed = time.perf_counter() - t0
    model_io.save_ct(ct, ctx, out_path)
    click.echo(f"enc wrote ciphertext to {out_path} in {elapsed:.3f}s")


@main.command()
@click.option("--pk", "pk_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--ct", "ct_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--keys", "keys_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Emit machine-readable JSON.")
@_handle_errors
def infer(pk_path, ct_path, keys_dir, model_path, as_json):
    """Decrypt the class scores of an encrypted input."""
    ctx = setup_group(128)
    model, _ = model_io.load_model(model_path)
    pk, _, _ = model_io.load_pk(pk_path, ctx)
    ct = model_io.load_ct(ct_path, ctx)
    keys = _load_keys_dir(keys_dir, ctx)
    table = dlog.build_table(ctx, model.score_bound)
    timings = {}
    scores = quadnet.infer_encrypted(pk, ct, keys, model, table, timings=timings)
    best = quadnet.argmax(scores)
    if as_json:
        click.echo(json.dumps({
            "scores": scores,
            "argmax": best,
            "timings": {k: round(v, 6) for k, v in timings.items()},
        }))
    else:
        click.echo(f"scores: {scores}")
        click.echo(f"argmax: {best}")
        click.echo(
            f"timings: evaluation {timings['evaluation_s']:.3f}s, "
            f"dlog {timings['dlog_s']:.3f}s"
        )


def synthesize_bench_model(n, d, ell, rng):
    """Sparse synthetic integer model sized so its dlog table stays small."""
    if n < 3 or d < 1 or ell < 1:
        raise ValidationError("bench requires n >= 3, d >= 1, classes >= 1")
    meta = QuantMeta(bits=4, input_bits=4)
    p_mat = []
    for _ in range(d):
        row = [0] * (n + 1)
        row[0] = rng.choice((-2, -1, 1, 2))
        for j in rng.sample(range(1, n + 1), 2):
            row[j] = rng.choice((-2, -1, 1, 2))
        p_mat.append(row)
    diag = [[rng.randrange(-3, 4) for _ in range(d)] for _ in range(ell)]
    probe = type("_Probe", (), {"p_mat": p_mat, "diag": diag})()
    return quadnet.QuadModel(
        p_mat=p_mat, diag=diag, quant=meta,
        score_bound=score_bound(probe, meta.input_max),
    )


@main.command()
@click.option("--n", default=785, show_default=True, help="Plaintext dimension (incl. bias).")
@click.option("--d", default=40, show_default=True, help="Hidden width.")
@click.option("--classes", "ell", default=10, show_default=True)
@click.option("--reps", default=1, show_default=True)
@_seed_options
@_handle_errors
def bench(n, d, ell, reps, insecure_test, seed):
    """Benchmark the four pipeline phases on a synthetic model."""
    rng = _rng(insecure_test, seed)
    ctx = setup_group(128)
    model = synthesize_bench_model(n - 1, d, ell, rng)
    fc = model.function_class()
    table = dlog.build_table(ctx, model.score_bound)
    phases = {"keygen": [], "encryption": [], "evaluation": [], "dlog": []}
    for _ in range(reps):
        x = [rng.randrange(0, model.quant.input_max + 1) for _ in range(model.n)]
        t0 = time.perf_counter()
        pk, msk = fe_setup(fc, ctx, rng)
        keys = quadnet.keygen_model(msk, model, ctx)
        t1 = time.perf_counter()
        ct = quadnet.encrypt_input(pk, x, fc, rng)
        t2 = time.perf_counter()
        timings = {}
        scores = quadnet.infer_encrypted(pk, ct, keys, model, table, timings=timings)
        assert scores == quadnet.infer_plaintext_oracle(model, x)
        phases["keygen"].append(t1 - t0)
        phases["encryption"].append(t2 - t1)
        phases["evaluation"].append(timings["evaluation_s"])
        phases["dlog"].append(timings["dlog_s"])
    for name, vals in phases.items():
        mean = statistics.fmean(vals)
        std = statistics.stdev(vals) if len(vals) > 1 else 0.0
        click.echo(f"{name}: {1e3 * mean:.1f} ms +- {1e3 * std:.1f} ms over {reps} reps")


if __name__ == "__main__":
    main()
