from setuptools import setup

setup(
        name='LogitLeak',
        version='0.1',
        description='Logit extraction from a quantized network through its '
                    'EM side channel, and black-box adversarial examples '
                    'built on the extracted logits.',
        url='',
        license='MIT',
        install_requires=[
            'numpy',
            'scipy',
            'h5py',
            'toml',
            'dask',
            'toolz',
            'joblib',
            'tqdm',
        ],
        extras_require={
            'test': ['pytest'],
        },
        packages=[
                'LogitLeak',
                'LogitLeak.qnn',
                'LogitLeak.leaksim',
                'LogitLeak.sca',
                'LogitLeak.extract',
                'LogitLeak.advgen',
                'LogitLeak.evaluate',
                'LogitLeak.visualize',
                'LogitLeak.models',
                'LogitLeak.util',
                'LogitLeak.cli',
        ],
        entry_points={
            'console_scripts': [
                'logitleak=LogitLeak.cli.main:run',
            ],
        },
)
