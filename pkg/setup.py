from setuptools import Extension, setup

setup(
    ext_modules=[
        Extension(
            "qseq._qkernel",
            sources=["src/qseq/_qkernel.c"],
            extra_compile_args=["-O3"],
        )
    ]
)
