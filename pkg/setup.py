from setuptools import setup, find_packages

setup(
    name='CyberXAssertLoom',
    version='0.1.0',
    author='CyberXAssertLoom contributors',
    description='Temporal assertion reduction: semantic and automata-based clustering with MCTS-guided, lasso-certified rewriting.',
    long_description=open('README.md', encoding='utf-8').read(),
    long_description_content_type='text/markdown',
    packages=find_packages(exclude=['tests', 'examples', 'examples.*']),
    python_requires='>=3.9',
    install_requires=[
        'numpy',
        'scipy',
        'scikit-learn',
        'pyparsing>=3.0',
        'requests'
    ],
    extras_require={
        'sentence': ['sentence-transformers'],
    },
    classifiers=[
        'Programming Language :: Python :: 3',
        'License :: OSI Approved :: MIT License'
    ],
    entry_points={
        'console_scripts': [
            'assertloom=cli.main:main',
        ],
    },
)
