"""ldql: Link Traversal queries over a Web of Linked Data.

Parses, analyzes and evaluates LDQL queries, executes Web-safe ones by
looking URIs up, and translates property paths, NautiLOD and
reachability-based SPARQL into LDQL.
"""

__version__ = "0.1.0"
