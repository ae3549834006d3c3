"""Versioned binary file formats for models, keys, and ciphertexts.

These formats are the cross-component contract: anything that can write
them (for example a separate training pipeline) interoperates with this
package.  All files are canonical: loading and re-saving reproduces the
input byte for byte.

Model file (magic ``QFE1``)::

    magic(4) | version u32 | header_len u32 | header JSON | tensor payloads

The header is canonical JSON (sorted keys, no spaces) describing dims,
quantization metadata, the score bound, tensor dtypes/shapes, and an
optional public-head description.  Integer tensors are little-endian
int32, float tensors little-endian float32, row-major.

Key and ciphertext files share a common envelope::

    magic(4) | version u32 | curve_len u8 | curve_id | body

with magics ``QFPK`` (public key), ``QFMS`` (master secret), ``QFDK``
(functional key) and ``QFCT`` (ciphertext).  Group elements use the
canonical compressed encodings.  Master secret files are plaintext:
protect them with filesystem permissions, there is no at-rest encryption.
"""

import json
import struct

import numpy as np

from .errors import CurveMismatchError, FormatError
from .group import G1Elem, G2Elem
from .qfe import Ciphertext, FunctionalKey, MasterSecretKey, PublicKey, QuadraticForm
from .quadnet import QuadModel
from .quantize import QuantMeta

MODEL_MAGIC = b"QFE1"
PK_MAGIC = b"QFPK"
MSK_MAGIC = b"QFMS"
DK_MAGIC = b"QFDK"
CT_MAGIC = b"QFCT"
VERSION = 1

_SCALAR_LEN = 32


class _Reader:
    def __init__(self, data, section):
        self.data = data
        self.off = 0
        self.section = section

    def take(self, k):
        if self.off + k > len(self.data):
            raise FormatError("truncated payload", section=self.section)
        out = self.data[self.off:self.off + k]
        self.off += k
        return out

    def u8(self):
        return self.take(1)[0]

    def u32(self):
        return struct.unpack("<I", self.take(4))[0]

    def done(self):
        if self.off != len(self.data):
            raise FormatError("trailing bytes after payload", section=self.section)


def _check_envelope(rd, magic, kind):
    got = rd.take(4)
    if got != magic:
        raise FormatError(f"bad magic {got!r}, expected {magic!r}", section=kind)
    version = rd.u32()
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", section=kind)


def _envelope(magic, curve_id):
    cid = curve_id.encode()
    return magic + struct.pack("<I", VERSION) + bytes([len(cid)]) + cid


def _check_curve(rd, ctx, kind):
    cid = rd.take(rd.u8()).decode()
    if cid != ctx.curve_id:
        raise CurveMismatchError(
            f"file curve {cid!r} does not match runtime {ctx.curve_id!r}",
            section=kind,
        )


# ---------------------------------------------------------------------------
# Model files
# ---------------------------------------------------------------------------

def _canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def model_to_bytes(model: QuadModel, public_head=None) -> bytes:
    p_arr = np.asarray(model.p_mat, dtype="<i4")
    d_arr = np.asarray(model.diag, dtype="<i4")
    tensors = [
        {"dtype": "<i4", "name": "p_mat", "shape": list(p_arr.shape)},
        {"dtype": "<i4", "name": "diag", "shape": list(d_arr.shape)},
    ]
    payloads = [p_arr.tobytes(), d_arr.tobytes()]
    header = {
        "bits": model.quant.bits,
        "d": model.d,
        "ell": model.ell,
        "input_bits": model.quant.input_bits,
        "n": model.n,
        "scale_d": model.quant.scale_d,
        "scale_p": model.quant.scale_p,
        "score_bound": model.score_bound,
    }
    if public_head is not None:
        head_meta = {
            "activation": public_head["activation"],
            "layers": list(public_head["layers"]),
            "tensors": sorted(public_head["tensors"]),
        }
        for name in head_meta["tensors"]:
            arr = np.asarray(public_head["tensors"][name], dtype="<f4")
            tensors.append({"dtype": "<f4", "name": name, "shape": list(arr.shape)})
            payloads.append(arr.tobytes())
        header["public_head"] = head_meta
    header["tensors"] = tensors
    hdr = _canonical_json(header)
    return (
        MODEL_MAGIC
        + struct.pack("<II", VERSION, len(hdr))
        + hdr
        + b"".join(payloads)
    )


def model_from_bytes(data: bytes):
    """Returns (QuadModel, public_head-or-None)."""
    rd = _Reader(data, "model header")
    got = rd.take(4)
    if got != MODEL_MAGIC:
        raise FormatError(f"bad magic {got!r}, expected {MODEL_MAGIC!r}", section="model header")
    version, hdr_len = struct.unpack("<II", rd.take(8))
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", section="model header")
    try:
        header = json.loads(rd.take(hdr_len))
    except ValueError as exc:
        raise FormatError(f"invalid JSON header: {exc}", section="model header") from None
    rd.section = "model tensors"
    arrays = {}
    for t in header.get("tensors", []):
        if t.get("dtype") not in ("<i4", "<f4"):
            raise FormatError(f"unsupported tensor dtype {t.get('dtype')!r}", section="model tensors")
        count = int(np.prod(t["shape"], dtype=np.int64))
        raw = rd.take(count * 4)
        arrays[t["name"]] = np.frombuffer(raw, dtype=t["dtype"]).reshape(t["shape"])
    rd.done()
    for required in ("p_mat", "diag"):
        if required not in arrays:
            raise FormatError(f"missing tensor {required!r}", section="model tensors")
    meta = QuantMeta(
        bits=header["bits"],
        input_bits=header["input_bits"],
        scale_p=header["scale_p"],
        scale_d=header["scale_d"],
    )
    model = QuadModel(
        p_mat=arrays["p_mat"].tolist(),
        diag=arrays["diag"].tolist(),
        quant=meta,
        score_bound=int(header["score_bound"]),
    )
    if (model.n, model.d, model.ell) != (header["n"], header["d"], header["ell"]):
        raise FormatError("declared dims do not match tensor shapes", section="model header")
    head = None
    if "public_head" in header:
        hm = header["public_head"]
        head = {
            "activation": hm["activation"],
            "layers": list(hm["layers"]),
            "tensors": {name: arrays[name] for name in hm["tensors"]},
        }
    return model, head


def save_model(model, path, public_head=None):
    with open(path, "wb") as fh:
        fh.write(model_to_bytes(model, public_head))


def load_model(path):
    with open(path, "rb") as fh:
        return model_from_bytes(fh.read())


# ---------------------------------------------------------------------------
# Key files
# ---------------------------------------------------------------------------

def pk_to_bytes(pk: PublicKey, input_bits, weight_bits) -> bytes:
    body = struct.pack("<III", pk.n, input_bits, weight_bits)
    body += b"".join(e.to_bytes() for e in pk.g1_s)
    body += b"".join(e.to_bytes() for e in pk.g2_t)
    return _envelope(PK_MAGIC, pk.group.curve_id) + body


def pk_from_bytes(data, ctx):
    """Returns (PublicKey, input_bits, weight_bits)."""
    rd = _Reader(data, "public key")
    _check_envelope(rd, PK_MAGIC, "public key")
    _check_curve(rd, ctx, "public key")
    n, input_bits, weight_bits = struct.unpack("<III", rd.take(12))
    g1_s = tuple(G1Elem.from_bytes(rd.take(48)) for _ in range(n))
    g2_t = tuple(G2Elem.from_bytes(rd.take(96)) for _ in range(n))
    rd.done()
    return PublicKey(group=ctx, g1_s=g1_s, g2_t=g2_t), input_bits, weight_bits


def msk_to_bytes(msk: MasterSecretKey, ctx) -> bytes:
    body = struct.pack("<I", msk.n)
    body += b"".join(int(v).to_bytes(_SCALAR_LEN, "big") for v in msk.s)
    body += b"".join(int(v).to_bytes(_SCALAR_LEN, "big") for v in msk.t)
    return _envelope(MSK_MAGIC, ctx.curve_id) + body


def msk_from_bytes(data, ctx) -> MasterSecretKey:
    rd = _Reader(data, "master secret")
    _check_envelope(rd, MSK_MAGIC, "master secret")
    _check_curve(rd, ctx, "master secret")
    n = rd.u32()
    vals = []
    for _ in range(2 * n):
        v = int.from_bytes(rd.take(_SCALAR_LEN), "big")
        if v >= ctx.p:
            raise FormatError("scalar not canonical", section="master secret")
        vals.append(v)
    rd.done()
    return MasterSecretKey(s=tuple(vals[:n]), t=tuple(vals[n:]))


def dk_to_bytes(dk: FunctionalKey, ctx, index=0) -> bytes:
    dim = dk.form.n
    body = struct.pack("<II", index, dim)
    body += b"".join(
        struct.pack("<q", c) for row in dk.form.coeffs for c in row
    )
    body += dk.k.to_bytes()
    return _envelope(DK_MAGIC, ctx.curve_id) + body


def dk_from_bytes(data, ctx):
    """Returns (FunctionalKey, index)."""
    rd = _Reader(data, "functional key")
    _check_envelope(rd, DK_MAGIC, "functional key")
    _check_curve(rd, ctx, "functional key")
    index, dim = struct.unpack("<II", rd.take(8))
    coeffs = []
    for _ in range(dim):
        coeffs.append([struct.unpack("<q", rd.take(8))[0] for _ in range(dim)])
    k = G2Elem.from_bytes(rd.take(96))
    rd.done()
    return FunctionalKey(k=k, form=QuadraticForm(coeffs)), index


# ---------------------------------------------------------------------------
# Ciphertext files
# ---------------------------------------------------------------------------

def ct_to_bytes(ct: Ciphertext, ctx) -> bytes:
    body = struct.pack("<I", ct.n)
    body += ct.c_gamma.to_bytes()
    body += b"".join(e.to_bytes() for pair in ct.a for e in pair)
    body += b"".join(e.to_bytes() for pair in ct.b for e in pair)
    return _envelope(CT_MAGIC, ctx.curve_id) + body


def ct_from_bytes(data, ctx) -> Ciphertext:
    rd = _Reader(data, "ciphertext")
    _check_envelope(rd, CT_MAGIC, "ciphertext")
    _check_curve(rd, ctx, "ciphertext")
    n = rd.u32()
    c_gamma = G1Elem.from_bytes(rd.take(48))
    a = tuple(
        (G1Elem.from_bytes(rd.take(48)), G1Elem.from_bytes(rd.take(48)))
        for _ in range(n)
    )
    b = tuple(
        (G2Elem.from_bytes(rd.take(96)), G2Elem.from_bytes(rd.take(96)))
        for _ in range(n)
    )
    rd.done()
    return Ciphertext(c_gamma=c_gamma, a=a, b=b)


def _save(path, data):
    with open(path, "wb") as fh:
        fh.write(data)


def _load(path):
    with open(path, "rb") as fh:
        return fh.read()


def save_pk(pk, path, input_bits, weight_bits):
    _save(path, pk_to_bytes(pk, input_bits, weight_bits))


def load_pk(path, ctx):
    return pk_from_bytes(_load(path), ctx)


def save_msk(msk, ctx, path):
    _save(path, msk_to_bytes(msk, ctx))


def load_msk(path, ctx):
    return msk_from_bytes(_load(path), ctx)


def save_dk(dk, ctx, path, index=0):
    _save(path, dk_to_bytes(dk, ctx, index))


def load_dk(path, ctx):
    return dk_from_bytes(_load(path), ctx)


def save_ct(ct, ctx, path):
    _save(path, ct_to_bytes(ct, ctx))


def load_ct(path, ctx):
    return ct_from_bytes(_load(path), ctx)
