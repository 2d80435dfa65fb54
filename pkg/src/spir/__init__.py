"""Symmetric private information retrieval from replicated databases over F_q.

Three schemes share one code construction: TBSPIR tolerates B Byzantine
nodes, TESPIR hides the database from E eavesdropped nodes, TBESPIR does both.
"""

from .adversary import AttackPlan, Strategy, confusing_pairs, corrupt, tap
from .audit import (
    AuditReport,
    Constraint,
    Verdict,
    audit_all,
    audit_database_privacy,
    audit_eavesdropper_privacy,
    audit_user_privacy,
)
from .codes import GrsSpec, Matrix, grs_generator, rs_decode, solve_square
from .errors import SpirError
from .gf import FieldElement, Locators, PrimeField, default_locators, field_new
from .schemes import (
    AnswerVector,
    CommonRandomness,
    Database,
    QuerySet,
    RetrievalResult,
    SchemeKind,
    SchemeParams,
    answer_all,
    answer_gen,
    capacity,
    decode,
    honest_round,
    query_gen,
    secrecy_rate,
)

__all__ = [
    "AnswerVector", "AttackPlan", "AuditReport", "CommonRandomness", "Constraint", "Database",
    "FieldElement", "GrsSpec", "Locators", "Matrix", "PrimeField", "QuerySet", "RetrievalResult",
    "SchemeKind", "SchemeParams", "SpirError", "Strategy", "Verdict", "answer_all", "answer_gen",
    "audit_all", "audit_database_privacy", "audit_eavesdropper_privacy", "audit_user_privacy",
    "capacity", "confusing_pairs", "corrupt", "decode", "default_locators", "field_new",
    "grs_generator", "honest_round", "query_gen", "rs_decode", "secrecy_rate", "solve_square",
    "tap",
]
