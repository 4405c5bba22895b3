from django.apps import AppConfig

class CoreConfig(AppConfig):
    """CLI, run configuration and run ledger."""
    default_auto_field = "django.db.models.BigAutoField"
    name = "core"
    verbose_name = "Core (STO-RL lab)"
