"""Matroid Phase: rastgele seyrek matrislerde rank ve minör faz geçişi"""
__version__ = "1.0.0"
