"""Sanitizing reverse proxy.

Inspects each HTTP request for SQL-injection and cross-site-scripting
payloads before relaying it to the protected application, hashes sensitive
form fields, tracks attacker reputation with automatic IP and account
blocking, and exposes a JSON admin API over the persisted attack logs.
"""

from .config import ProxyConfig, load_config
from .model import AttackClass, AttackEvent, ClientRequest, DecisionKind, ProxyDecision
from .pipeline import Pipeline
from .reputation import ReputationStore
from .server import ProxyServer
from .adminapi import AdminServer

__version__ = "0.1.0"

__all__ = [
    "AdminServer",
    "AttackClass",
    "AttackEvent",
    "ClientRequest",
    "DecisionKind",
    "Pipeline",
    "ProxyConfig",
    "ProxyDecision",
    "ProxyServer",
    "ReputationStore",
    "load_config",
    "__version__",
]
