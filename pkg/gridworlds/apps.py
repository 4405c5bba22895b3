from django.apps import AppConfig


class GridworldsConfig(AppConfig):
    """Deterministic CliffWalking / FourRoom grids and the kinematic point maze."""
    default_auto_field = "django.db.models.BigAutoField"
    name = "gridworlds"
