#!/usr/bin/env python3
"""
Installation test script for eh-certify
"""

import sys
import os

# Suppress warnings for clean output
import warnings
warnings.filterwarnings("ignore", category=UserWarning)
warnings.filterwarnings("ignore", category=DeprecationWarning)

def test_imports():
    """Test that all required modules can be imported"""
    print("🧪 Testing imports...")

    try:
        import networkx
        print(f"✅ networkx {networkx.__version__} imported successfully")
    except ImportError as e:
        print(f"❌ networkx import failed: {e}")
        return False

    try:
        import pydantic
        print("✅ pydantic imported successfully")
    except ImportError as e:
        print(f"❌ pydantic import failed: {e}")
        return False

    try:
        import hypothesis
        print("✅ hypothesis imported successfully")
    except ImportError as e:
        print(f"❌ hypothesis import failed: {e}")
        return False

    try:
        from dotenv import load_dotenv
        print("✅ python-dotenv imported successfully")
    except ImportError as e:
        print(f"❌ python-dotenv import failed: {e}")
        return False

    return True

def test_project_imports():
    """Test that project modules can be imported"""
    print("\n🧪 Testing project imports...")

    try:
        from src.graph_core import Graph, CaterpillarShape
        from src.graph_io import read_graph
        print("✅ Graph core imported successfully")
    except ImportError as e:
        print(f"❌ Graph core import failed: {e}")
        return False

    try:
        from src.oracle import Certificate, verify_certificate
        print("✅ Oracle imported successfully")
    except ImportError as e:
        print(f"❌ Oracle import failed: {e}")
        return False

    try:
        from src.pipeline import dichotomy, constants
        print("✅ Pipeline imported successfully")
    except ImportError as e:
        print(f"❌ Pipeline import failed: {e}")
        return False

    return True

def test_smoke():
    """Run the smallest schedule and one verified certificate"""
    print("\n🧪 Running smoke check...")

    from src.graph_core import CaterpillarShape, Graph
    from src.pipeline import constants, dichotomy

    schedule = constants(CaterpillarShape(h=1, d=0, t=0))
    if schedule.ell != 3:
        print(f"❌ Expected 3 colour classes for T(1,0,0), got {schedule.ell}")
        return False
    print(f"✅ T(1,0,0): ell={schedule.ell}, alpha={schedule.alpha.render()}")

    two_edges = Graph(4, [(0, 1), (2, 3)])
    cert = dichotomy(two_edges, Graph(3, [(0, 1), (1, 2)]))
    print(f"✅ Two disjoint edges give a verified {cert.kind} certificate")
    return True

def test_environment():
    """Test environment setup"""
    print("\n🧪 Testing environment...")

    # Check Python version
    python_version = sys.version_info
    print(f"✅ Python version: {python_version.major}.{python_version.minor}.{python_version.micro}")

    if python_version < (3, 9):
        print("❌ Python 3.9+ is required")
        return False

    # Check if .env file exists
    if os.path.exists('.env'):
        print("✅ .env file found")
    else:
        print("⚠️  .env file not found (defaults will be used)")

    return True

def main():
    """Run all tests"""
    print("🔎 eh-certify - Installation Test")
    print("=" * 40)

    all_passed = True

    # Test imports
    if not test_imports():
        all_passed = False

    # Test project imports
    if all_passed and not test_project_imports():
        all_passed = False

    if all_passed and not test_smoke():
        all_passed = False

    # Test environment
    if not test_environment():
        all_passed = False

    print("\n" + "=" * 40)
    if all_passed:
        print("🎉 All tests passed! Your installation is ready.")
        print("\nNext steps:")
        print("1. Optionally copy env.example to .env and adjust the settings")
        print("2. Run: python main.py constants --shape 2,1,1")
        print("3. Run: python demo_dichotomy.py")
    else:
        print("❌ Some tests failed. Please check the errors above.")
        print("\nTroubleshooting:")
        print("1. Make sure you're using Python 3.9+")
        print("2. Try: pip install -r requirements.txt --force-reinstall")
        print("3. Check the README.md for more details")

    return all_passed

if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
