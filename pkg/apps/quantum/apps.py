from django.apps import AppConfig


class QuantumConfig(AppConfig):
    name = "apps.quantum"
    label = "quantum"
    verbose_name = "Quantum Evaluation"
