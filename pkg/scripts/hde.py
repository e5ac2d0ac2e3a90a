"""
仓库根目录启动器：python scripts/hde.py <子命令> ...
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.main import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
