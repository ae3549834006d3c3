"""Writer/reader for the integer model file format (magic ``QFE1``).

Independent implementation of the cross-component contract:

    magic(4) | version u32 | header_len u32 | canonical JSON header | tensors

The header carries dims, quantization metadata, the worst-case score
bound, tensor descriptors, and an optional public-head description;
integer tensors are little-endian int32 and float tensors little-endian
float32, row-major, in header order.  Canonical form: load + save is
byte-identical.
"""

import json
import struct

import numpy as np

MAGIC = b"QFE1"
VERSION = 1


def write_model(p_int, diag_int, *, bits, input_bits, scale_p, scale_d,
                score_bound, public_head=None) -> bytes:
    p_arr = np.asarray(p_int, dtype="<i4")
    d_arr = np.asarray(diag_int, dtype="<i4")
    tensors = [
        {"dtype": "<i4", "name": "p_mat", "shape": list(p_arr.shape)},
        {"dtype": "<i4", "name": "diag", "shape": list(d_arr.shape)},
    ]
    payloads = [p_arr.tobytes(), d_arr.tobytes()]
    header = {
        "bits": int(bits),
        "d": int(p_arr.shape[0]),
        "ell": int(d_arr.shape[0]),
        "input_bits": int(input_bits),
        "n": int(p_arr.shape[1]) - 1,
        "scale_d": float(scale_d),
        "scale_p": float(scale_p),
        "score_bound": int(score_bound),
    }
    if public_head is not None:
        meta = {
            "activation": public_head["activation"],
            "layers": list(public_head["layers"]),
            "tensors": sorted(public_head["tensors"]),
        }
        for name in meta["tensors"]:
            arr = np.asarray(public_head["tensors"][name], dtype="<f4")
            tensors.append({"dtype": "<f4", "name": name, "shape": list(arr.shape)})
            payloads.append(arr.tobytes())
        header["public_head"] = meta
    header["tensors"] = tensors
    hdr = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    return MAGIC + struct.pack("<II", VERSION, len(hdr)) + hdr + b"".join(payloads)


def read_model(data: bytes):
    """Returns (header dict, {tensor name: array})."""
    if data[:4] != MAGIC:
        raise ValueError(f"bad magic {data[:4]!r}")
    version, hdr_len = struct.unpack("<II", data[4:12])
    if version != VERSION:
        raise ValueError(f"unsupported version {version}")
    header = json.loads(data[12:12 + hdr_len])
    off = 12 + hdr_len
    arrays = {}
    for t in header["tensors"]:
        count = int(np.prod(t["shape"], dtype=np.int64))
        raw = data[off:off + 4 * count]
        if len(raw) != 4 * count:
            raise ValueError("truncated tensor payload")
        arrays[t["name"]] = np.frombuffer(raw, dtype=t["dtype"]).reshape(t["shape"])
        off += 4 * count
    if off != len(data):
        raise ValueError("trailing bytes after payload")
    return header, arrays
