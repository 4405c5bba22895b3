"""
Ponto de entrada único da pipeline STO-RL.

    python manage.py storl plan --config run.toml
    python manage.py storl train --task cliffwalking --method storl --seed 0 --set iql.batch_size=64

Exit codes: 0 ok, 1 configuration error, 2 runtime error (including a failed verify).
"""
import json
import logging
import uuid

from django.core.management.base import BaseCommand, CommandError

from core.config import load_config
from core.exceptions import ConfigError, StorlError
from core.logging_utils import run_scope
from core.models import RunRecord
from core.services.pipeline import COMMANDS, record_run
from gridworlds.services.tasks import TASK_IDS
from learner.services.state import METHODS

logger = logging.getLogger(__name__)

_HELP = {
    "plan": "Gera e valida o schedule de subobjectivos (LLM ou fixture)",
    "gen-data": "Gera o dataset offline (expert + política aleatória)",
    "augment": "Aumenta o dataset com índices de progresso e recompensa moldada",
    "train": "Treina STO-RL, IQL ou GC-BC e grava checkpoint e curva",
    "eval": "Avalia um checkpoint",
    "verify": "Corre os oráculos da recompensa moldada",
    "stats": "Estatísticas e verificação de replay do dataset",
    "value-map": "Exporta o mapa de valores de um checkpoint (tarefas em grelha)",
    "ablate": "Treina STO-RL com cada schedule da tarefa",
}


def _message(exc: Exception) -> str:
    if isinstance(exc, ConfigError):
        return "; ".join(exc.messages)
    return str(exc) or type(exc).__name__


class Command(BaseCommand):
    help = "Pipeline STO-RL: plan, gen-data, augment, train, eval, verify, stats, value-map, ablate"

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest="subcommand", required=True)
        for name in COMMANDS:
            sub = subparsers.add_parser(name, help=_HELP[name])
            sub.add_argument("--config", help="Ficheiro TOML com a RunConfig")
            sub.add_argument(
                "--set",
                dest="overrides",
                action="append",
                default=[],
                metavar="SECCAO.CHAVE=VALOR",
                help="Sobrepõe uma chave da configuração (repetível)",
            )
            sub.add_argument("--task", choices=TASK_IDS)
            sub.add_argument("--method", choices=METHODS)
            sub.add_argument("--seed", type=int)
            sub.add_argument("--iterations", type=int)
            if name == "train":
                sub.add_argument("--resume", action="store_true", default=None, help="Retoma do checkpoint existente")
            if name in ("eval", "value-map"):
                sub.add_argument("--checkpoint", help="Caminho do checkpoint (sobrepõe paths.checkpoint)")

    def handle(self, *args, **options):
        command = options["subcommand"]
        overrides = list(options["overrides"])
        if options.get("checkpoint"):
            overrides.append(f"paths.checkpoint={json.dumps(options['checkpoint'])}")

        run_id = uuid.uuid4().hex[:12]
        with run_scope(run_id, command):
            self._run(command, overrides, options, run_id)

    def _run(self, command, overrides, options, run_id):
        config = None
        try:
            config = load_config(
                options["config"],
                overrides,
                task=options["task"],
                method=options["method"],
                seed=options["seed"],
                iterations=options["iterations"],
                resume=options.get("resume"),
            )
            summary = COMMANDS[command](config)
        except ConfigError as exc:
            message = _message(exc)
            record_run(command, config, RunRecord.Status.CONFIG_ERROR, {"error": message}, run_id)
            raise CommandError(f"{command}: {message}", returncode=1) from exc
        except StorlError as exc:
            message = _message(exc)
            record_run(command, config, RunRecord.Status.FAILED, {"error": message}, run_id)
            raise CommandError(f"{command}: {message}", returncode=2) from exc
        except Exception as exc:
            logger.exception(f"Erro inesperado em {command}")
            message = f"{type(exc).__name__}: {exc}"
            record_run(command, config, RunRecord.Status.FAILED, {"error": message}, run_id)
            raise CommandError(f"{command}: {message}", returncode=2) from exc

        failed = summary.get("passed") is False
        status = RunRecord.Status.FAILED if failed else RunRecord.Status.OK
        record_run(command, config, status, summary, run_id)
        self.stdout.write(json.dumps({"command": command, "status": status.value, **summary}, sort_keys=True, default=str))
        if failed:
            raise CommandError(f"{command}: há oráculos que falharam", returncode=2)
