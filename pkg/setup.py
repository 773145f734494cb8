
from setuptools import setup

setup(name='emogest',
      version='0.1.0',
      description="Emotional speech-driven 3D gesture generation and editing",
      long_description="""\
Disentangles speech into content, emotion and style latents, samples
full-body motion with a latent diffusion model conditioned on them, and
edits generated gestures by swapping latents between two recordings.
""",
      classifiers=[
        'Development Status :: 2 - Pre-Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: Apache Software License',
        'Natural Language :: English',
        'Operating System :: MacOS :: MacOS X',
        'Operating System :: POSIX :: Linux',
        'Operating System :: Microsoft :: Windows',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
        'Topic :: Multimedia :: Sound/Audio :: Speech',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: Implementation :: CPython',
      ],
      keywords='gesture generation speech emotion diffusion motion',
      author='',
      author_email='',
      license='Apache License, Version 2.0',
      packages=[
          'emogest',
          'emogest.core',
          'emogest.core.test',
          'emogest.util',
          'emogest.util.test',
          'emogest.test',
          'emogest.test.test',
          'emogest.audio',
          'emogest.audio.test',
          'emogest.body',
          'emogest.body.test',
          'emogest.prior',
          'emogest.prior.test',
          'emogest.diffusion',
          'emogest.diffusion.test',
          'emogest.disentangle',
          'emogest.disentangle.test',
          'emogest.editing',
          'emogest.editing.test',
          'emogest.evaluation',
          'emogest.evaluation.test',
          'emogest.data',
          'emogest.data.test',
          'emogest.drivers',
          'emogest.drivers.test',
          'emogest.recorders',
          'emogest.recorders.test',
          'emogest.cli',
          'emogest.cli.test',
      ],
      package_data = {'emogest': ['defaults.ini']},
      install_requires=[
        'six', 'Sphinx', 'numpydoc', 'networkx', 'numpy', 'scipy', 'torch', 'torchaudio'
      ],
      extras_require={
        'hdf5': ['h5py'],
      },
      entry_points= """
        [console_scripts]
        emogest=emogest.cli.main:main
      """
    )
