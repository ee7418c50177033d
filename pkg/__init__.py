"""
Root package for the LTI consistent-initialization toolkit
"""
