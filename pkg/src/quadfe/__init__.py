"""Functional encryption for bounded quadratic forms over bilinear groups.

The package provides:

- ``quadfe.group``: a Type-3 bilinear group backend (BLS12-381) with an
  instrumented operation counter;
- ``quadfe.qfe``: the public-key functional encryption scheme whose keys
  reveal exactly one quadratic form of the encrypted vectors;
- ``quadfe.dlog``: precomputed bounded discrete logarithm in the target
  group;
- ``quadfe.project``: linear-homomorphic ciphertext projection;
- ``quadfe.quadnet``: encrypted inference for quadratic networks with
  diagonal class forms and pairing reuse;
- ``quadfe.quantize``: integer quantization of real-valued models and
  exact output-bound computation;
- ``quadfe.model_io``: versioned binary formats for models, keys and
  ciphertexts;
- ``quadfe.cli``: the ``quadfe`` command-line tool.
"""

__version__ = "0.1.0"
