import os
import glob
import importlib

from ..utils.log import log_error


def load_solvers(solver_folder: str, target_package: str, solver_dict: dict):
    for module_path in sorted(glob.glob(os.path.join(solver_folder, "*.py"))):
        module_name = os.path.splitext(os.path.basename(module_path))[0]
        if module_name.startswith("_"):
            continue
        import_path = f"{target_package}.{module_name}"

        try:
            module = importlib.import_module(import_path)
            if hasattr(module, "SOLVERS"):
                solver_dict.update(module.SOLVERS)
        except Exception as e:
            log_error(f"Failed to load {import_path}: {e}")
