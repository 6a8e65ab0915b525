# Boolean function toolkit
