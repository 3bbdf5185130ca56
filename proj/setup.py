"""CMake bridge: builds the _sepnet pybind11 module and ships it inside the
sepnet package. Keeps a plain setuptools backend so `pip install -e .
--no-build-isolation` works with only cmake + pybind11 present."""
import pathlib
import shutil
import subprocess
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext
from setuptools.extension import Extension


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = pathlib.Path(__file__).resolve().parent
        build_dir = pathlib.Path(self.build_temp) / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)
        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_sepnet", "-j"],
            check=True,
        )
        produced = sorted(build_dir.glob("_sepnet*.so"))
        if not produced:
            raise RuntimeError("CMake did not produce the _sepnet module")
        dest = pathlib.Path(self.get_ext_fullpath(ext.name))
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(produced[-1], dest)


setup(
    ext_modules=[CMakeExtension("sepnet._sepnet")],
    cmdclass={"build_ext": CMakeBuild},
)
