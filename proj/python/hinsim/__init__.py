"""Python access to the hinsim core."""

from ._hinsim import (
    Hin,
    IngestError,
    commuting_matrix,
    h0,
    kmeans,
    load,
    meta_structure,
    ndcg,
    nmi,
    pathsim,
    schema,
    sms_commuting_matrix,
    sms_layers,
    smss_matrix,
)

__all__ = [
    "Hin",
    "IngestError",
    "commuting_matrix",
    "h0",
    "kmeans",
    "load",
    "meta_structure",
    "ndcg",
    "nmi",
    "pathsim",
    "schema",
    "sms_commuting_matrix",
    "sms_layers",
    "smss_matrix",
]
