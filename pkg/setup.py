from setuptools import setup

setup(
    name='tpmc-lab',
    version='0.1.0',
    description='Exact solver and verifier for the transportation problem with market choice.',
    packages=['tpmc'],
    py_modules=['tpmctool'],
    python_requires='>=3.8',
    install_requires=[
        'bunch',
        'numpy',
        'scipy',
        'sympy',
    ],
    extras_require={
        'test': ['pytest', 'hypothesis'],
    },
    entry_points={
        'console_scripts': ['tpmctool = tpmctool:main'],
    })
