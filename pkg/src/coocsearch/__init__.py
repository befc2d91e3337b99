"""Graph-query search over a document corpus.

Builds an ontology-annotated co-occurrence network from titles and
abstracts, and answers small user-drawn graph queries by inexact matching
with shortest-path expansion, ranking publications by how many query
relationships each one explains.
"""

__version__ = "0.1.0"
