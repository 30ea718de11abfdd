import logging
import os
from datetime import datetime, timezone
from typing import Any

from config import MANIFEST_FILE
from models import AppConfig, RunManifest

logger = logging.getLogger(__name__)


class ReportWriter:
    """Writes a finished command's files into one output directory."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir

    def manifest(self, command: str, config: AppConfig, base_seed: int, details: dict[str, Any]) -> str:
        manifest = RunManifest(
            command=command,
            base_seed=base_seed,
            timestamp=datetime.now(timezone.utc).isoformat(),
            config=config.model_dump(mode='json'),
            details=details,
        )
        return manifest.model_dump_json(indent=2) + '\n'

    def write_files(self, files: dict[str, str]) -> list[str]:
        os.makedirs(self.out_dir, exist_ok=True)
        paths = []
        for name, text in files.items():
            path = os.path.join(self.out_dir, name)
            with open(path, 'w', encoding='utf-8', newline='') as handle:
                handle.write(text)
            paths.append(path)
            logger.info(f'✅ Wrote {path}')
        return paths

    def write_with_manifest(
        self,
        files: dict[str, str],
        command: str,
        config: AppConfig,
        base_seed: int,
        details: dict[str, Any],
    ) -> list[str]:
        return self.write_files({**files, MANIFEST_FILE: self.manifest(command, config, base_seed, details)})
