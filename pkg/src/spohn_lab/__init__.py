"""Spohn conditional-independence varieties of binary games on undirected graphical models."""
from __future__ import annotations

from .game import Game, random_game
from .graph import CIStatement, Graph, Partition, global_markov, pairwise_markov
from .polyring import Polynomial, VarTable

__version__ = "0.1.0"

__all__ = [
    "CIStatement",
    "Game",
    "Graph",
    "Partition",
    "Polynomial",
    "VarTable",
    "global_markov",
    "pairwise_markov",
    "random_game",
]
