"""Compact multi-signatures compiled from linear identification schemes.

Two backends share one compiler: Schnorr over a prime-order subgroup and a
ring-LWE scheme with a multi-slot commitment. See ``lsig.multisig`` for the
signing session and ``lsig.cli`` for the command-line tool.
"""
__version__ = "0.1.0"
