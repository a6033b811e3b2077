"""bubres: resonancia de Minnaert de burbujas 2D de forma arbitraria y su
corrimiento por un recubrimiento delgado.

Ejecutar desde CLI:
bubres minnaert --config corrida.json
bubres coated --config corrida.json
bubres sweep --config corrida.json --variable eps
"""
__all__ = []
